#pragma once

// Inflection histograms over successful adversaries, and training-set
// augmentation by weighted random inflection.

#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "morpheus/dataset.hpp"
#include "morpheus/hash.hpp"
#include "morpheus/lexicon.hpp"
#include "morpheus/search.hpp"
#include "morpheus/tagger.hpp"

namespace morpheus {

struct InflectionDistribution {
  std::map<PtbTag, double> weights;

  double total() const {
    double t = 0.0;
    for (const auto& [tag, w] : weights) t += w;
    return t;
  }

  bool empty() const { return total() <= 0.0; }

  double weight(PtbTag t) const {
    auto it = weights.find(t);
    return it == weights.end() ? 0.0 : it->second;
  }

  /// Weights divided by their total; empty when the total is zero.
  std::map<PtbTag, double> normalized() const {
    std::map<PtbTag, double> out;
    const double t = total();
    if (t <= 0.0) return out;
    for (const auto& [tag, w] : weights) out[tag] = w / t;
    return out;
  }

  void add(PtbTag t, double w) {
    if (!is_content_tag(t)) throw FormatError("only content-word tags carry weight: " + std::string(to_string(t)));
    if (!(w >= 0.0) || !std::isfinite(w)) throw FormatError("weights must be finite and non-negative");
    weights[t] += w;
  }
};

inline json to_json(const InflectionDistribution& d) {
  json w = json::object();
  for (const auto& [tag, v] : d.weights) w[std::string(to_string(tag))] = v;
  return json{{"weights", w}, {"total", d.total()}};
}

inline InflectionDistribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("weights") || !j["weights"].is_object()) {
    throw FormatError("distribution needs a \"weights\" object");
  }
  InflectionDistribution d;
  for (const auto& [key, v] : j["weights"].items()) {
    const auto tag = parse_ptb_tag(key);
    if (!tag) throw FormatError("unknown tag in distribution: " + key);
    if (!v.is_number()) throw FormatError("weight for " + key + " is not a number");
    d.add(*tag, v.get<double>());
  }
  return d;
}

inline InflectionDistribution load_distribution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open distribution " + path.string());
  try {
    return distribution_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

/// Content hash of the weights, independent of formatting.
inline std::string distribution_hash(const InflectionDistribution& d) {
  return sha256_hex(to_json(d)["weights"].dump());
}

/// Whether the adversary did any damage.
inline bool degrades(const AttackResult& r) {
  return objective(r.adversarial_score, r.lower_is_worse) > objective(r.clean_score, r.lower_is_worse);
}

/// Counts the new tag of every substitution. With `filter_degrading`, only
/// results that actually hurt the model count. Failed results never count.
inline InflectionDistribution compute_distribution(const std::vector<AttackResult>& results,
                                                   bool filter_degrading) {
  InflectionDistribution d;
  for (const auto& r : results) {
    if (r.failed) continue;
    if (filter_degrading && !degrades(r)) continue;
    for (const auto& s : r.substitutions) {
      if (is_content_tag(s.tag_new)) d.weights[s.tag_new] += 1.0;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Weighted random inflection

struct Draw {
  std::size_t index = 0;
  PtbTag tag_original = PtbTag::OTHER;
  PtbTag tag = PtbTag::OTHER;
  std::string surface;
};

struct Variant {
  std::string text;
  std::vector<Draw> draws;  // one per eligible token, changed or not
};

/// Candidate tags available to one token, in first-seen order, each with the
/// surfaces that realise it.
inline std::vector<std::pair<PtbTag, std::vector<std::string>>> tag_options(const Token& tok,
                                                                           const Lexicon& lexicon) {
  std::vector<std::pair<PtbTag, std::vector<std::string>>> out;
  for (const auto& c : lexicon.get_inflections(tok.surface, tok.upos, true)) {
    PtbTag t = c.tag;
    if (t == PtbTag::OTHER) t = tok.tag;  // unknown word: the token alone
    if (is_proper_noun(tok.tag)) {
      if (t == PtbTag::NN) t = PtbTag::NNP;
      if (t == PtbTag::NNS) t = PtbTag::NNPS;
    }
    auto it = std::find_if(out.begin(), out.end(), [t](const auto& p) { return p.first == t; });
    if (it == out.end()) {
      out.push_back({t, {}});
      it = std::prev(out.end());
    }
    it->second.push_back(c.surface);
  }
  return out;
}

/// Draws one tag with probability proportional to its weight among the
/// tags on offer, then one surface uniformly. Zero total weight (or
/// `uniform`) means every available tag is equally likely.
inline std::size_t pick_tag(const std::vector<std::pair<PtbTag, std::vector<std::string>>>& options,
                            const InflectionDistribution& dist, bool uniform, Rng& rng) {
  std::vector<double> w;
  double total = 0.0;
  for (const auto& [tag, surfaces] : options) {
    const double x = uniform ? 1.0 : dist.weight(tag);
    w.push_back(x);
    total += x;
  }
  if (total <= 0.0) std::fill(w.begin(), w.end(), 1.0);
  std::discrete_distribution<std::size_t> d(w.begin(), w.end());
  return d(rng);
}

/// Element 0 is the clean sentence; elements 1..k are random inflections of
/// every eligible token.
inline std::vector<Variant> random_inflect(const TaggedSentence& sent, int k,
                                           const InflectionDistribution& dist, const Lexicon& lexicon,
                                           bool uniform, Rng& rng) {
  if (k < 1) throw ConfigError("k must be at least 1");
  std::vector<Variant> out;
  out.push_back({detokenize(sent), {}});
  std::vector<std::vector<std::pair<PtbTag, std::vector<std::string>>>> options(sent.tokens.size());
  for (const auto& tok : sent.tokens) {
    if (is_eligible(tok)) options[tok.index] = tag_options(tok, lexicon);
  }
  for (int v = 0; v < k; ++v) {
    Variant var;
    auto surfaces = surfaces_of(sent);
    for (const auto& tok : sent.tokens) {
      const auto& opts = options[tok.index];
      if (opts.empty()) continue;
      const auto& [tag, forms] = opts[pick_tag(opts, dist, uniform, rng)];
      std::uniform_int_distribution<std::size_t> pick(0, forms.size() - 1);
      surfaces[tok.index] = forms[pick(rng)];
      var.draws.push_back({tok.index, tok.tag, tag, surfaces[tok.index]});
    }
    var.text = detokenize_with(sent, surfaces);
    out.push_back(std::move(var));
  }
  return out;
}

/// Expected tag histogram for `sent` under `dist`: for each eligible token,
/// the weights renormalised over the tags it can take.
inline void expected_tags(const TaggedSentence& sent, const InflectionDistribution& dist,
                          const Lexicon& lexicon, bool uniform, std::map<PtbTag, double>& acc) {
  for (const auto& tok : sent.tokens) {
    if (!is_eligible(tok)) continue;
    const auto opts = tag_options(tok, lexicon);
    double total = 0.0;
    for (const auto& o : opts) total += uniform ? 1.0 : dist.weight(o.first);
    for (const auto& o : opts) {
      const double w = total > 0.0 ? (uniform ? 1.0 : dist.weight(o.first)) / total
                                   : 1.0 / static_cast<double>(opts.size());
      acc[o.first] += w;
    }
  }
}

// ---------------------------------------------------------------------------
// Training-set generation

struct TrainsetRecord {
  std::string source_id;
  int variant = 0;
  std::string text;
  const Example* source = nullptr;  // task fields passed through
};

enum class TrainsetFormat { JSONL, SQUAD, PARALLEL };

inline std::optional<TrainsetFormat> parse_trainset_format(std::string_view s) {
  const std::string l = to_lower(s);
  if (l == "jsonl") return TrainsetFormat::JSONL;
  if (l == "squad") return TrainsetFormat::SQUAD;
  if (l == "parallel") return TrainsetFormat::PARALLEL;
  return std::nullopt;
}

class TrainsetWriter {
 public:
  virtual ~TrainsetWriter() = default;
  virtual void write(const TrainsetRecord& rec) = 0;
  virtual void finish() {}
};

/// One JSON object per line: source_id, variant, text, payload (the input
/// record minus the perturbed field and any pretagging).
class JsonlTrainsetWriter : public TrainsetWriter {
 public:
  explicit JsonlTrainsetWriter(std::ostream& out) : out_(&out) {}
  void write(const TrainsetRecord& rec) override {
    json payload = rec.source->raw;
    payload.erase(std::string(text_field(rec.source->context.task)));
    payload.erase("tokens");
    payload.erase("tags");
    json j{{"source_id", rec.source_id}, {"variant", rec.variant}, {"text", rec.text}, {"payload", payload}};
    *out_ << j.dump() << '\n';
  }

 private:
  std::ostream* out_;
};

/// SQuAD v1.1 layout, one article per source example, streamed.
class SquadTrainsetWriter : public TrainsetWriter {
 public:
  explicit SquadTrainsetWriter(std::ostream& out) : out_(&out) {
    *out_ << "{\"version\":\"1.1\",\"data\":[";
  }

  void write(const TrainsetRecord& rec) override {
    const auto& ctx = rec.source->context;
    if (ctx.task != Task::QA) throw ConfigError("squad output needs a qa dataset");
    if (rec.variant == 0) flush_article();
    if (!current_) {
      current_ = json{{"title", rec.source_id},
                      {"paragraphs", json::array({json{{"context", *ctx.passage}, {"qas", json::array()}}})}};
    }
    json answers = json::array();
    for (const auto& a : *ctx.gold_answers) {
      const auto pos = ctx.passage->find(a);
      answers.push_back(
          {{"text", a}, {"answer_start", pos == std::string::npos ? -1 : static_cast<long long>(pos)}});
    }
    const std::string qid = rec.variant == 0 ? rec.source_id
                                             : rec.source_id + "-adv" + std::to_string(rec.variant);
    (*current_)["paragraphs"][0]["qas"].push_back(
        {{"id", qid}, {"question", rec.text}, {"answers", answers}});
  }

  void finish() override {
    flush_article();
    *out_ << "]}\n";
  }

 private:
  void flush_article() {
    if (!current_) return;
    if (articles_++ > 0) *out_ << ',';
    *out_ << current_->dump();
    current_.reset();
  }

  std::ostream* out_;
  std::optional<json> current_;
  std::size_t articles_ = 0;
};

/// Line-aligned source and target files for MT.
class ParallelTrainsetWriter : public TrainsetWriter {
 public:
  ParallelTrainsetWriter(std::ostream& src, std::ostream& tgt) : src_(&src), tgt_(&tgt) {}
  void write(const TrainsetRecord& rec) override {
    const auto& ctx = rec.source->context;
    if (ctx.task != Task::MT) throw ConfigError("parallel output needs an mt dataset");
    *src_ << one_line(rec.text) << '\n';
    *tgt_ << one_line(*ctx.reference) << '\n';
  }

 private:
  static std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  }
  std::ostream* src_;
  std::ostream* tgt_;
};

struct TrainsetOptions {
  int k = 4;
  bool uniform = false;
  std::uint64_t seed = 0;
  std::optional<Task> task;
  unsigned jobs = 1;
  bool adverbs_eligible = false;
  std::size_t chunk = 1024;  // examples in flight when jobs > 1
};

struct TrainsetStats {
  std::size_t inputs = 0;
  std::size_t records = 0;
  std::vector<ParseFailure> skipped;
  std::map<PtbTag, double> sampled_tags;  // over all draws in variants 1..k
  std::map<PtbTag, double> expected_tags;
};

/// One pass over `in`. Memory is bounded by the chunk size, not the corpus.
inline TrainsetStats generate_trainset(std::istream& in, const InflectionDistribution& dist,
                                       const Lexicon& lexicon, const Tagger& tagger,
                                       TrainsetWriter& writer, const TrainsetOptions& opts,
                                       bool collect_tag_stats = false) {
  if (opts.k < 1) throw ConfigError("k must be at least 1");
  TrainsetStats stats;
  std::vector<Example> chunk;
  std::vector<std::vector<Variant>> variants;
  std::vector<std::map<PtbTag, double>> expected;

  auto process = [&](std::size_t i) {
    const Example& ex = chunk[i];
    const TaggedSentence sent = prepare(ex, tagger, opts.adverbs_eligible);
    Rng rng(derive_seed(opts.seed, ex.id));
    variants[i] = random_inflect(sent, opts.k, dist, lexicon, opts.uniform, rng);
    // variant 0 is the input field verbatim, even if tokenization was lossy
    variants[i][0].text = ex.text;
    if (collect_tag_stats) {
      std::map<PtbTag, double> e;
      expected_tags(sent, dist, lexicon, opts.uniform, e);
      expected[i] = std::move(e);
    }
  };

  auto flush = [&] {
    variants.assign(chunk.size(), {});
    expected.assign(chunk.size(), {});
    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(chunk.size())));
    if (jobs <= 1) {
      for (std::size_t i = 0; i < chunk.size(); ++i) process(i);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < chunk.size();) process(i);
        });
      }
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      ++stats.inputs;
      for (std::size_t v = 0; v < variants[i].size(); ++v) {
        writer.write({chunk[i].id, static_cast<int>(v), variants[i][v].text, &chunk[i]});
        ++stats.records;
        if (collect_tag_stats && v > 0) {
          for (const auto& d : variants[i][v].draws) stats.sampled_tags[d.tag] += 1.0;
        }
      }
      if (collect_tag_stats) {
        for (const auto& [t, w] : expected[i]) stats.expected_tags[t] += w * opts.k;
      }
    }
    chunk.clear();
  };

  const std::size_t chunk_size = opts.jobs > 1 ? std::max<std::size_t>(1, opts.chunk) : 1;
  for_each_example(
      in, opts.task,
      [&](Example&& ex) {
        chunk.push_back(std::move(ex));
        if (chunk.size() >= chunk_size) flush();
      },
      [&](const ParseFailure& f) { stats.skipped.push_back(f); });
  if (!chunk.empty()) flush();
  writer.finish();
  return stats;
}

/// L1 distance between two histograms after normalising each to sum 1.
inline double l1_distance(const std::map<PtbTag, double>& a, const std::map<PtbTag, double>& b) {
  double ta = 0.0, tb = 0.0;
  for (const auto& [t, v] : a) ta += v;
  for (const auto& [t, v] : b) tb += v;
  std::set<PtbTag> keys;
  for (const auto& [t, v] : a) keys.insert(t);
  for (const auto& [t, v] : b) keys.insert(t);
  double d = 0.0;
  for (auto t : keys) {
    const double x = a.count(t) && ta > 0 ? a.at(t) / ta : 0.0;
    const double y = b.count(t) && tb > 0 ? b.at(t) / tb : 0.0;
    d += std::abs(x - y);
  }
  return d;
}

}  // namespace morpheus
