// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "morpheus/augment.hpp"
#include "morpheus/cli.hpp"
#include "morpheus/hash.hpp"
#include "morpheus/metrics.hpp"
#include "morpheus/resources.hpp"
#include "morpheus/search.hpp"

using namespace morpheus;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << std::fixed << x;
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("morpheus-acceptance-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Synthetic sentences built from lexicon forms

class SentenceMaker {
 public:
  explicit SentenceMaker(const Lexicon& lex) {
    for (const auto& e : lex.entries()) {
      auto& pool = e.upos == UPos::NOUN ? nouns_ : e.upos == UPos::VERB ? verbs_ : e.upos == UPos::ADJ ? adjs_ : skip_;
      for (const auto& f : e.forms) pool.push_back(f.surface);
    }
  }

  std::string make(Rng& rng) {
    static const std::vector<std::string> templates = {
        "The A N V the N.",
        "N V in the A N.",
        "Why did the N V the A N?",
        "The N and the N V near N, A and A.",
        "A N V.",
        "When is the N V to V?",
        "The N of the A N V the N on the N.",
        "Some N V, but the N V A.",
    };
    const std::string& t = templates[pick(templates.size(), rng)];
    std::string out;
    for (char c : t) {
      switch (c) {
        case 'N': out += draw(nouns_, rng); break;
        case 'V': out += draw(verbs_, rng); break;
        case 'A': out += draw(adjs_, rng); break;
        default: out += c;
      }
    }
    return out;
  }

 private:
  static std::size_t pick(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  static const std::string& draw(const std::vector<std::string>& pool, Rng& rng) {
    return pool[pick(pool.size(), rng)];
  }

  std::vector<std::string> nouns_, verbs_, adjs_, skip_;
};

std::size_t eligible_count(const TaggedSentence& s) {
  std::size_t n = 0;
  for (const auto& t : s.tokens) n += is_eligible(t);
  return n;
}

/// Maximum toy loss over every combination of constrained inflections.
/// Works from the lexicon directly rather than through the search code.
double exhaustive_max(const TaggedSentence& sent, const Lexicon& lex, const BagOfTagsOracle& oracle) {
  std::vector<std::size_t> positions;
  std::vector<std::vector<std::string>> options;
  for (const auto& t : sent.tokens) {
    if (!is_eligible(t)) continue;
    std::set<std::string> forms;
    for (const auto& c : lex.get_inflections(t.surface, t.upos, true)) forms.insert(c.surface);
    positions.push_back(t.index);
    options.emplace_back(forms.begin(), forms.end());
  }
  auto surfaces = surfaces_of(sent);
  double best = -INFINITY;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == positions.size()) {
      best = std::max(best, oracle.loss(detokenize_with(sent, surfaces)));
      return;
    }
    for (const auto& s : options[k]) {
      surfaces[positions[k]] = s;
      rec(k + 1);
    }
  };
  rec(0);
  return best;
}

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Search

void check_search(const Resources& res) {
  const Lexicon& lex = *res.lexicon;
  const BuiltinTagger& tagger = *res.tagger;
  SentenceMaker maker(lex);
  Rng rng(20240601);

  std::vector<std::string> corpus;
  while (corpus.size() < 120) {
    std::string s = maker.make(rng);
    const auto n = eligible_count(analyze(s, tagger));
    if (n >= 1 && n <= 6) corpus.push_back(std::move(s));
  }

  BagOfTagsOracle toy(tagger, {{PtbTag::VBG, 1.0}, {PtbTag::NNS, 1.0}, {PtbTag::JJS, 0.5}, {PtbTag::VBD, 0.25}});

  const auto t0 = Clock::now();
  std::size_t seq_ok = 0, par_ok = 0, monotone = 0, improved = 0;
  std::string first_bad;
  for (const auto& s : corpus) {
    const double best = exhaustive_max(analyze(s, tagger), lex, toy);
    AttackConfig seq;
    seq.rng_seed = 11;
    AttackConfig par = seq;
    par.mode = SearchMode::PARALLEL;
    const auto rs = attack(s, {}, toy, seq, lex, tagger);
    const auto rp = attack(s, {}, toy, par, lex, tagger);
    const bool s_ok = rs.adversarial_score == best;
    const bool p_ok = rp.adversarial_score == best;
    seq_ok += s_ok;
    improved += best > rs.clean_score;
    par_ok += p_ok;
    if ((!s_ok || !p_ok) && first_bad.empty()) {
      first_bad = " first mismatch: \"" + s + "\" best=" + fmt(best) + " seq=" + fmt(rs.adversarial_score) +
                  " par=" + fmt(rp.adversarial_score);
    }
    monotone += non_decreasing(rs.trace) && non_decreasing(rs.reverse_trace);
  }
  const double secs = seconds_since(t0);
  const std::size_t n = corpus.size();
  report("brute-force equivalence", seq_ok == n && par_ok == n && n >= 100 && secs < 60.0,
         "sequential " + std::to_string(seq_ok) + "/" + std::to_string(n) + ", parallel " +
             std::to_string(par_ok) + "/" + std::to_string(n) + " equal the exhaustive maximum (" +
             std::to_string(improved) + " above the clean loss) in " + fmt(secs, 2) + " s" + first_bad);
  report("greedy monotonicity", monotone == n,
         std::to_string(monotone) + "/" + std::to_string(n) + " sequential runs have non-decreasing traces");

  // Early termination with a keyword oracle. Two in three examples get a
  // trigger that some eligible token can be inflected into; the rest get a
  // trigger no candidate can produce.
  std::size_t reachable = 0, reached = 0, iff_ok = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto sent = analyze(corpus[i], tagger);
    std::set<std::string> present;
    for (const auto& t : sent.tokens) present.insert(to_lower(t.surface));
    std::vector<std::string> triggers;
    for (const auto& t : sent.tokens) {
      if (!is_eligible(t)) continue;
      for (const auto& c : lex.get_inflections(t.surface, t.upos, true)) {
        if (!present.count(to_lower(c.surface))) triggers.push_back(c.surface);
      }
    }
    const bool use_reachable = i % 3 != 2 && !triggers.empty();
    const std::string trigger =
        use_reachable ? triggers[std::uniform_int_distribution<std::size_t>(0, triggers.size() - 1)(rng)]
                      : "zyzzyva";
    KeywordOracle kw({trigger});
    AttackConfig cfg;
    cfg.failure_threshold = 0.0;
    cfg.rng_seed = i;
    const auto r = attack(corpus[i], {}, kw, cfg, lex, tagger);
    if (use_reachable) {
      ++reachable;
      reached += r.terminated_early;
    }
    iff_ok += r.terminated_early == (r.adversarial_score <= 0.0);
  }
  report("early termination", reached == reachable && iff_ok == n && reachable > 0,
         std::to_string(reached) + "/" + std::to_string(reachable) +
             " reachable triggers terminate early; terminated_early <=> score <= 0 holds in " +
             std::to_string(iff_ok) + "/" + std::to_string(n));
}

// ---------------------------------------------------------------------------
// Morphology

void check_morphology(const Lexicon& lex) {
  std::size_t forms = 0, round_trip = 0, cands = 0, upos_ok = 0;
  Rng rng(1);
  for (const auto& e : lex.entries()) {
    for (const auto& f : e.forms) {
      ++forms;
      round_trip += lex.lemmatize(f.surface, e.upos) == e.lemma;
      for (const auto& c : lex.get_inflections(f.surface, e.upos, true)) {
        ++cands;
        upos_ok += c.upos == e.upos && tag_family(c.tag) == e.upos;
      }
    }
  }
  report("morphology round-trip", forms > 0 && round_trip == forms && upos_ok == cands,
         "lemmatize restores the lemma for " + std::to_string(round_trip) + "/" + std::to_string(forms) +
             " forms; UPOS kept by " + std::to_string(upos_ok) + "/" + std::to_string(cands) +
             " constrained candidates");
}

// ---------------------------------------------------------------------------
// Tokenizer

std::string mixed_sentence(Rng& rng, const std::vector<std::string>& words) {
  static const std::vector<std::string> extras = {
      ",", ".", "!", "?", ";", ":", "...", "\"", "'", "(", ")", "[", "]", "“", "”", "‘", "’", "—", "–",
      "don't", "it's", "John's", "they’re", "can't", "Dr.", "U.S.", "e.g.", "3.5", "1,000", "$5", "100%",
      "well-known", "naïve", "Zürich", "東京", "http://example.org/a?b=c", "user@example.com", "#tag",
      "@name", "911", "'90s", "rock'n'roll", "--", "&", "C++", "Ph.D.", "«", "»", "…"};
  static const std::vector<std::string> gaps = {" ", " ", " ", " ", "", "", "  ", "\t", "\n", " \n "};
  auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::string s;
  if (pick(8) == 0) s += gaps[pick(gaps.size())];
  const std::size_t len = 1 + pick(18);
  for (std::size_t i = 0; i < len; ++i) {
    if (i > 0) s += gaps[pick(gaps.size())];
    std::string w = pick(3) == 0 ? extras[pick(extras.size())] : words[pick(words.size())];
    if (pick(6) == 0 && !w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (pick(10) == 0) w = to_upper(w);
    s += w;
  }
  if (pick(8) == 0) s += gaps[pick(gaps.size())];
  return s;
}

void check_tokenizer(const Lexicon& lex) {
  std::vector<std::string> words;
  for (const auto& e : lex.entries()) {
    for (const auto& f : e.forms) words.push_back(f.surface);
  }
  for (const char* w : {"the", "a", "of", "in", "and", "to", "was", "is", "by"}) words.push_back(w);
  Rng rng(77);
  std::size_t ok = 0;
  const std::size_t n = 1000;
  std::string first_bad;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string s = mixed_sentence(rng, words);
    const bool same = detokenize(tokenize(s)) == s;
    ok += same;
    if (!same && first_bad.empty()) first_bad = "; first failure: " + json(s).dump();
  }
  report("tokenizer inverse", ok == n,
         std::to_string(ok) + "/" + std::to_string(n) + " mixed sentences round-trip exactly" + first_bad);
}

// ---------------------------------------------------------------------------
// Metrics

void check_metrics() {
  std::vector<std::string> notes;
  bool ok = true;
  auto expect = [&](const std::string& what, double got, double want, double tol) {
    const bool good = std::abs(got - want) <= tol;
    if (!good) {
      ok = false;
      notes.push_back(what + " = " + fmt(got) + " (want " + fmt(want) + ")");
    }
  };

  expect("F1(Rollo, [Rollo])", qa_score("Rollo", {"Rollo"}).f1, 1.0, 1e-12);
  expect("F1(almost no foreign settlers, [Rollo])", qa_score("almost no foreign settlers", {"Rollo"}).f1, 0.0,
         1e-12);
  // relative decreases are in percent; tolerance 0.01 points
  expect("decrease(78.67, 53.94)", 100.0 * relative_decrease(78.67, 53.94), 31.43, 0.01);
  expect("decrease(43.16, 20.57)", 100.0 * relative_decrease(43.16, 20.57), 56.25, 0.01);

  const json g = json::parse(slurp(fs::path(MORPHEUS_TEST_DIR) / "golden" / "metrics_golden.json"));
  std::vector<std::string> hyps, refs;
  for (const auto& p : g["pairs"]) {
    hyps.push_back(p["hypothesis"]);
    refs.push_back(p["reference"]);
  }
  expect("corpus BLEU", bleu(hyps, refs), g["corpus_bleu_none"], 0.01);
  expect("corpus BLEU (floor)", bleu(hyps, refs, BleuSmoothing::Floor), g["corpus_bleu_floor"], 0.01);
  std::vector<std::string> sh, sr;
  for (const auto& p : g["sparse_pairs"]) {
    sh.push_back(p["hypothesis"]);
    sr.push_back(p["reference"]);
  }
  expect("sparse BLEU", bleu(sh, sr), g["sparse_bleu_none"], 0.01);
  expect("sparse BLEU (floor)", bleu(sh, sr, BleuSmoothing::Floor), g["sparse_bleu_floor"], 0.01);
  expect("corpus chrF", chrf(hyps, refs), g["corpus_chrf"], 0.01);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    expect("sentence BLEU #" + std::to_string(i), sentence_bleu(hyps[i], refs[i]), g["sentence_bleu_floor"][i],
           0.01);
    expect("sentence chrF #" + std::to_string(i), sentence_chrf(hyps[i], refs[i]), g["sentence_chrf"][i], 0.01);
  }

  std::string detail = "QA F1 cases, relative decreases, and " + std::to_string(4 + 1 + 2 * hyps.size()) +
                       " BLEU/chrF golden values";
  if (!notes.empty()) {
    detail += "; mismatches:";
    for (const auto& m : notes) detail += " " + m + ";";
  }
  report("metric fixtures", ok, detail);
}

// ---------------------------------------------------------------------------
// Training-set generation

long status_kb(const char* key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  const std::string k = std::string(key) + ":";
  while (std::getline(in, line)) {
    if (line.rfind(k, 0) == 0) return std::stol(line.substr(k.size()));
  }
  return -1;
}

bool reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  out << "5";
  out.flush();
  return static_cast<bool>(out);
}

/// Serialises records to JSONL only to hash them, and checks each one
/// against an independent analysis of its source.
class CheckingWriter : public TrainsetWriter {
 public:
  CheckingWriter(const Lexicon& lex, const Tagger& tagger) : lex_(&lex), tagger_(&tagger), jsonl_(buf_) {}

  void write(const TrainsetRecord& rec) override {
    ++records;
    jsonl_.write(rec);
    hash_.update(buf_.str());
    buf_.str("");
    if (rec.variant == 0) {
      clean_identical += rec.text == rec.source->text;
      original_ = analyze(rec.source->text, *tagger_);
      return;
    }
    const auto toks = tokenize(rec.text).tokens;
    bool ok = toks.size() == original_.tokens.size();
    for (std::size_t i = 0; ok && i < toks.size(); ++i) {
      const Token& o = original_.tokens[i];
      if (toks[i].surface == o.surface) continue;
      ++changed_tokens;
      ok = is_eligible(o) && lex_->knows(toks[i].surface, o.upos) &&
           lex_->lemmatize(toks[i].surface, o.upos) == lex_->lemmatize(o.surface, o.upos);
    }
    upos_kept += ok;
    ++perturbed;
  }

  std::string digest() { return hash_.hex(); }

  std::size_t records = 0, clean_identical = 0, perturbed = 0, upos_kept = 0, changed_tokens = 0;

 private:
  const Lexicon* lex_;
  const Tagger* tagger_;
  std::ostringstream buf_;
  JsonlTrainsetWriter jsonl_;
  Sha256 hash_;
  TaggedSentence original_;
};

void write_corpus(const fs::path& path, std::size_t n, SentenceMaker& maker, Rng& rng) {
  std::ofstream out(path);
  for (std::size_t i = 0; i < n; ++i) {
    out << json{{"id", "s" + std::to_string(i)}, {"text", maker.make(rng)}}.dump() << '\n';
  }
}

void check_trainset(const Resources& res) {
  const auto dir = scratch("trainset");
  SentenceMaker maker(*res.lexicon);
  Rng rng(4242);
  write_corpus(dir / "small.jsonl", 1000, maker, rng);
  write_corpus(dir / "large.jsonl", 10000, maker, rng);
  const InflectionDistribution dist =
      load_distribution(fs::path(MORPHEUS_TEST_DIR) / "golden" / "results50.dist.json");

  TrainsetOptions opts;
  opts.k = 4;
  opts.seed = 5;

  // Peak-RSS growth for 1k and 10k inputs; O(1) memory means the larger
  // run needs no more headroom than the smaller one.
  auto run = [&](const fs::path& in_path, CheckingWriter& w, long& growth_kb) {
    std::ifstream in(in_path);
    const bool reset = reset_peak_rss();
    const long before = reset ? status_kb("VmRSS") : status_kb("VmHWM");
    const auto stats = generate_trainset(in, dist, *res.lexicon, *res.tagger, w, opts, true);
    growth_kb = status_kb("VmHWM") - before;
    return stats;
  };

  long small_growth = 0, large_growth = 0;
  CheckingWriter small_w(*res.lexicon, *res.tagger);
  run(dir / "small.jsonl", small_w, small_growth);

  CheckingWriter w(*res.lexicon, *res.tagger);
  const auto t0 = Clock::now();
  const auto stats = run(dir / "large.jsonl", w, large_growth);
  const double secs = seconds_since(t0);

  const double l1 = l1_distance(stats.sampled_tags, stats.expected_tags);
  const bool memory_ok = large_growth <= small_growth + 8 * 1024;
  const bool ok = stats.inputs == 10000 && w.records == 50000 && w.clean_identical == 10000 &&
                  w.upos_kept == w.perturbed && l1 < 0.05 && memory_ok && secs < 120.0 && stats.skipped.empty();
  report("trainset generation", ok,
         std::to_string(w.records) + " records from " + std::to_string(stats.inputs) + " inputs, " +
             std::to_string(w.clean_identical) + " identical clean variants, UPOS kept in " +
             std::to_string(w.upos_kept) + "/" + std::to_string(w.perturbed) + " variants (" +
             std::to_string(w.changed_tokens) + " tokens changed), L1 " + fmt(l1) + ", peak RSS growth " +
             std::to_string(large_growth) + " kB (1k inputs: " + std::to_string(small_growth) + " kB), " +
             fmt(secs, 2) + " s");
}

// ---------------------------------------------------------------------------
// Reproducibility through the command line

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "morpheus");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

void check_reproducibility(const Resources& res) {
  const auto dir = scratch("repro");
  SentenceMaker maker(*res.lexicon);
  Rng rng(99);
  write_corpus(dir / "corpus.jsonl", 300, maker, rng);
  const fs::path fixtures = fs::path(MORPHEUS_TEST_DIR) / "fixtures";
  const std::string dist = (fs::path(MORPHEUS_TEST_DIR) / "golden" / "results50.dist.json").string();

  auto attack_toy = [&](const std::string& out) {
    return std::vector<std::string>{"attack", (dir / "corpus.jsonl").string(), "--oracle", "builtin:bag-of-tags",
                                    "--seed", "17", "--jobs", "4", "-o", (dir / out).string()};
  };
  auto attack_replay = [&](const std::string& out) {
    return std::vector<std::string>{"attack", (fixtures / "qa_small.jsonl").string(), "--oracle",
                                    "builtin:metric-replay", "--replay", (fixtures / "qa_small.replay.jsonl").string(),
                                    "--seed", "17", "-o", (dir / out).string()};
  };
  auto trainset = [&](const std::string& out) {
    return std::vector<std::string>{"gen-trainset", (dir / "corpus.jsonl").string(), "--dist", dist, "--k", "4",
                                    "--seed", "17", "-o", (dir / out).string()};
  };

  int codes = 0;
  for (const auto* suffix : {"1", "2"}) {
    codes |= cli(attack_toy(std::string("toy") + suffix + ".jsonl"));
    codes |= cli(attack_replay(std::string("replay") + suffix + ".jsonl"));
    codes |= cli(trainset(std::string("train") + suffix + ".jsonl"));
  }
  std::size_t same = 0;
  std::size_t bytes = 0;
  for (const char* stem : {"toy", "replay", "train"}) {
    const auto a = slurp(dir / (std::string(stem) + "1.jsonl"));
    const auto b = slurp(dir / (std::string(stem) + "2.jsonl"));
    same += !a.empty() && a == b;
    bytes += a.size();
  }
  report("reproducibility", codes == 0 && same == 3,
         std::to_string(same) + "/3 output pairs byte-identical (two attack runs, one trainset run; " +
             std::to_string(bytes) + " bytes), exit codes " + (codes == 0 ? "all 0" : "nonzero"));
}

}  // namespace

int main() {
  try {
    const Resources res = Resources::load_default();
    check_search(res);
    check_morphology(*res.lexicon);
    check_tokenizer(*res.lexicon);
    check_metrics();
    check_trainset(res);
    check_reproducibility(res);
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
