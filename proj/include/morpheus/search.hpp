#pragma once

// Greedy search over inflectional forms. For every eligible token the search
// queries the oracle with each alternative inflection and keeps the one that
// most increases the adversarial objective.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "morpheus/dataset.hpp"
#include "morpheus/lexicon.hpp"
#include "morpheus/metrics.hpp"
#include "morpheus/oracle.hpp"
#include "morpheus/tagger.hpp"
#include "morpheus/tokenizer.hpp"

namespace morpheus {

enum class SearchMode { SEQUENTIAL, PARALLEL };

inline std::string_view to_string(SearchMode m) {
  return m == SearchMode::SEQUENTIAL ? "seq" : "par";
}

inline std::optional<SearchMode> parse_mode(std::string_view s) {
  const std::string l = to_lower(s);
  if (l == "seq" || l == "sequential") return SearchMode::SEQUENTIAL;
  if (l == "par" || l == "parallel") return SearchMode::PARALLEL;
  return std::nullopt;
}

struct AttackConfig {
  bool constrain_upos = true;
  SearchMode mode = SearchMode::SEQUENTIAL;
  double failure_threshold = 0.0;
  bool shuffle_inflections = true;
  bool reverse_retry = true;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(failure_threshold >= 0.0)) throw ConfigError("failure_threshold must be >= 0");
  }
};

struct Substitution {
  std::size_t index = 0;
  std::string original_surface;
  std::string new_surface;
  PtbTag tag_original = PtbTag::OTHER;
  PtbTag tag_new = PtbTag::OTHER;

  friend bool operator==(const Substitution&, const Substitution&) = default;
};

struct AttackResult {
  std::string id;
  std::string original;
  std::string adversarial;
  double clean_score = 0.0;
  double adversarial_score = 0.0;
  bool lower_is_worse = true;
  std::size_t queries = 0;
  bool terminated_early = false;
  bool used_reverse_pass = false;
  std::vector<Substitution> substitutions;
  // objective after the clean query and after each visited token
  std::vector<double> trace;
  std::vector<double> reverse_trace;
  bool failed = false;
  std::string error;
};

inline json to_json(const Substitution& s) {
  return json{{"index", s.index},
              {"original_surface", s.original_surface},
              {"new_surface", s.new_surface},
              {"tag_original", std::string(to_string(s.tag_original))},
              {"tag_new", std::string(to_string(s.tag_new))}};
}

inline json to_json(const AttackResult& r) {
  json subs = json::array();
  for (const auto& s : r.substitutions) subs.push_back(to_json(s));
  json j{{"id", r.id},
         {"original", r.original},
         {"adversarial", r.adversarial},
         {"clean_score", r.clean_score},
         {"adversarial_score", r.adversarial_score},
         {"lower_is_worse", r.lower_is_worse},
         {"queries", r.queries},
         {"terminated_early", r.terminated_early},
         {"used_reverse_pass", r.used_reverse_pass},
         {"substitutions", subs},
         {"failed", r.failed}};
  if (r.failed) j["error"] = r.error;
  return j;
}

inline Substitution substitution_from_json(const json& j) {
  Substitution s;
  s.index = j.at("index").get<std::size_t>();
  s.original_surface = j.at("original_surface").get<std::string>();
  s.new_surface = j.at("new_surface").get<std::string>();
  s.tag_original = ptb_tag_or_other(j.at("tag_original").get<std::string>());
  s.tag_new = ptb_tag_or_other(j.at("tag_new").get<std::string>());
  return s;
}

inline AttackResult attack_result_from_json(const json& j) {
  AttackResult r;
  r.id = j.value("id", std::string());
  r.original = j.at("original").get<std::string>();
  r.adversarial = j.at("adversarial").get<std::string>();
  r.clean_score = j.at("clean_score").get<double>();
  r.adversarial_score = j.at("adversarial_score").get<double>();
  r.lower_is_worse = j.value("lower_is_worse", true);
  r.queries = j.value("queries", std::size_t{0});
  r.terminated_early = j.value("terminated_early", false);
  r.used_reverse_pass = j.value("used_reverse_pass", false);
  for (const auto& s : j.value("substitutions", json::array())) {
    r.substitutions.push_back(substitution_from_json(s));
  }
  r.failed = j.value("failed", false);
  r.error = j.value("error", std::string());
  return r;
}

/// Per-example seed, stable across platforms and independent of the order in
/// which examples are processed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view id) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed ^ h;  // splitmix64 finaliser
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

/// A token the search may touch: its UPOS is a content class.
inline bool is_eligible(const Token& tok) { return is_perturbable(tok.upos); }

/// Alternatives for one token, one per distinct surface. A proper-noun
/// source keeps proper-noun tags on its candidates.
inline std::vector<InflectionCandidate> candidates_for(const Token& tok, const Lexicon& lexicon,
                                                       bool constrain, bool shuffle, Rng& rng) {
  auto cands = unique_surfaces(lexicon.get_inflections(tok.surface, tok.upos, constrain, shuffle, rng));
  if (is_proper_noun(tok.tag)) {
    for (auto& c : cands) {
      if (c.tag == PtbTag::NN) c.tag = PtbTag::NNP;
      if (c.tag == PtbTag::NNS) c.tag = PtbTag::NNPS;
    }
  }
  for (auto& c : cands) {
    if (c.surface == tok.surface) c.tag = tok.tag;
  }
  return cands;
}

/// Outcome of one MaxInflected call.
struct Choice {
  std::size_t candidate = 0;  // index into the candidate list
  bool changed = false;
  double score = 0.0;
  std::size_t queries = 0;
};

/// Scores every non-incumbent candidate at `position` in one batch and
/// returns the best one. Only a strict improvement over the incumbent
/// objective displaces it; among equal challengers the earliest wins.
inline Choice max_inflected(const std::vector<InflectionCandidate>& candidates,
                            const TaggedSentence& sent, std::vector<std::string> surfaces,
                            std::size_t position, const TaskContext& context, Oracle& oracle,
                            double incumbent_score, bool lower_is_worse) {
  Choice choice;
  choice.score = incumbent_score;
  const std::string incumbent = surfaces[position];
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].surface == incumbent) choice.candidate = i;
  }

  OracleRequest req{context, {}};
  std::vector<std::size_t> which;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].surface == incumbent) continue;
    surfaces[position] = candidates[i].surface;
    req.candidates.push_back(detokenize_with(sent, surfaces));
    which.push_back(i);
  }
  if (req.candidates.empty()) return choice;

  const OracleResponse resp = oracle.score_batch(req);
  if (resp.scores.size() != req.candidates.size()) {
    throw ProtocolError("oracle returned the wrong number of scores");
  }
  if (resp.lower_is_worse != lower_is_worse) {
    throw ProtocolError("oracle changed lower_is_worse mid-example");
  }
  choice.queries = req.candidates.size();
  double best = objective(incumbent_score, lower_is_worse);
  for (std::size_t k = 0; k < which.size(); ++k) {
    const double obj = objective(resp.scores[k], lower_is_worse);
    if (obj > best) {
      best = obj;
      choice.candidate = which[k];
      choice.changed = true;
      choice.score = resp.scores[k];
    }
  }
  return choice;
}

namespace detail {

struct PassResult {
  std::vector<std::string> surfaces;
  std::vector<PtbTag> tags;
  double score = 0.0;
  std::size_t queries = 0;
  bool terminated = false;
  std::vector<double> trace;
};

inline bool failed_task(double score, bool lower_is_worse, double threshold) {
  return lower_is_worse && score <= threshold;
}

inline PassResult sequential_pass(const TaggedSentence& sent, const std::vector<std::size_t>& order,
                                  const TaskContext& ctx, Oracle& oracle, const Lexicon& lexicon,
                                  const AttackConfig& cfg, Rng& rng, double clean_score,
                                  bool lower_is_worse) {
  PassResult pass;
  pass.surfaces = surfaces_of(sent);
  for (const auto& t : sent.tokens) pass.tags.push_back(t.tag);
  pass.score = clean_score;
  pass.trace.push_back(objective(clean_score, lower_is_worse));
  for (std::size_t pos : order) {
    const auto cands = candidates_for(sent.tokens[pos], lexicon, cfg.constrain_upos,
                                      cfg.shuffle_inflections, rng);
    const Choice c = max_inflected(cands, sent, pass.surfaces, pos, ctx, oracle, pass.score,
                                   lower_is_worse);
    pass.queries += c.queries;
    if (c.changed) {
      pass.surfaces[pos] = cands[c.candidate].surface;
      pass.tags[pos] = cands[c.candidate].tag;
      pass.score = c.score;
    }
    pass.trace.push_back(objective(pass.score, lower_is_worse));
    if (failed_task(pass.score, lower_is_worse, cfg.failure_threshold)) {
      pass.terminated = true;
      break;
    }
  }
  return pass;
}

inline std::vector<Substitution> diff(const TaggedSentence& sent, const std::vector<std::string>& surfaces,
                                      const std::vector<PtbTag>& tags) {
  std::vector<Substitution> out;
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    if (surfaces[i] == sent.tokens[i].surface) continue;
    out.push_back({i, sent.tokens[i].surface, surfaces[i], sent.tokens[i].tag, tags[i]});
  }
  return out;
}

}  // namespace detail

/// Runs the attack on an already tagged sentence. Oracle errors propagate.
inline AttackResult attack_tagged(const TaggedSentence& sent, const TaskContext& ctx, Oracle& oracle,
                                  const AttackConfig& cfg, const Lexicon& lexicon, Rng& rng) {
  cfg.validate();
  AttackResult r;
  r.original = detokenize(sent);
  r.adversarial = r.original;

  const OracleResponse clean = oracle.score_batch({ctx, {r.original}});
  if (clean.scores.size() != 1) throw ProtocolError("oracle returned the wrong number of scores");
  r.clean_score = r.adversarial_score = clean.scores[0];
  r.lower_is_worse = clean.lower_is_worse;
  r.queries = 1;
  r.trace.push_back(objective(r.clean_score, r.lower_is_worse));
  if (detail::failed_task(r.clean_score, r.lower_is_worse, cfg.failure_threshold)) {
    r.terminated_early = true;
    return r;
  }

  std::vector<std::size_t> order;
  for (const auto& t : sent.tokens) {
    if (is_eligible(t)) order.push_back(t.index);
  }
  if (order.empty()) return r;

  if (cfg.mode == SearchMode::SEQUENTIAL) {
    auto fwd = detail::sequential_pass(sent, order, ctx, oracle, lexicon, cfg, rng, r.clean_score,
                                       r.lower_is_worse);
    r.queries += fwd.queries;
    r.trace = fwd.trace;
    detail::PassResult* best = &fwd;
    detail::PassResult rev;
    if (!fwd.terminated && cfg.reverse_retry) {
      std::vector<std::size_t> reversed(order.rbegin(), order.rend());
      rev = detail::sequential_pass(sent, reversed, ctx, oracle, lexicon, cfg, rng, r.clean_score,
                                    r.lower_is_worse);
      r.queries += rev.queries;
      r.reverse_trace = rev.trace;
      if (objective(rev.score, r.lower_is_worse) > objective(fwd.score, r.lower_is_worse)) {
        best = &rev;
        r.used_reverse_pass = true;
      }
    }
    r.adversarial_score = best->score;
    r.terminated_early = best->terminated;
    r.adversarial = detokenize_with(sent, best->surfaces);
    r.substitutions = detail::diff(sent, best->surfaces, best->tags);
    return r;
  }

  // parallel: every token against the original sentence
  const auto original = surfaces_of(sent);
  std::vector<std::string> surfaces = original;
  std::vector<PtbTag> tags;
  for (const auto& t : sent.tokens) tags.push_back(t.tag);
  std::optional<std::pair<std::size_t, double>> best_single;
  std::vector<PtbTag> single_tags = tags;
  std::string single_surface;
  for (std::size_t pos : order) {
    const auto cands =
        candidates_for(sent.tokens[pos], lexicon, cfg.constrain_upos, cfg.shuffle_inflections, rng);
    const Choice c = max_inflected(cands, sent, original, pos, ctx, oracle, r.clean_score,
                                   r.lower_is_worse);
    r.queries += c.queries;
    if (!c.changed) continue;
    surfaces[pos] = cands[c.candidate].surface;
    tags[pos] = cands[c.candidate].tag;
    if (!best_single ||
        objective(c.score, r.lower_is_worse) > objective(best_single->second, r.lower_is_worse)) {
      best_single = {pos, c.score};
      single_surface = cands[c.candidate].surface;
      single_tags = std::vector<PtbTag>(1, cands[c.candidate].tag);
    }
  }
  if (!best_single) return r;

  const std::string combined = detokenize_with(sent, surfaces);
  double combined_score = best_single->second;
  const auto changed = detail::diff(sent, surfaces, tags);
  if (changed.size() > 1) {
    const OracleResponse resp = oracle.score_batch({ctx, {combined}});
    if (resp.scores.size() != 1) throw ProtocolError("oracle returned the wrong number of scores");
    r.queries += 1;
    combined_score = resp.scores[0];
  }
  // Winners chosen in isolation can interact; never return something worse
  // than the best single substitution.
  if (objective(combined_score, r.lower_is_worse) >=
      objective(best_single->second, r.lower_is_worse)) {
    r.adversarial = combined;
    r.adversarial_score = combined_score;
    r.substitutions = changed;
  } else {
    std::vector<std::string> one = original;
    one[best_single->first] = single_surface;
    std::vector<PtbTag> one_tags;
    for (const auto& t : sent.tokens) one_tags.push_back(t.tag);
    one_tags[best_single->first] = single_tags.front();
    r.adversarial = detokenize_with(sent, one);
    r.adversarial_score = best_single->second;
    r.substitutions = detail::diff(sent, one, one_tags);
  }
  r.terminated_early = detail::failed_task(r.adversarial_score, r.lower_is_worse, cfg.failure_threshold);
  return r;
}

/// Tokenizes/tags `ex` with `tagger` (or its pretagged tokens) and attacks it.
inline TaggedSentence prepare(const Example& ex, const Tagger& tagger, bool adverbs_eligible) {
  if (ex.tokens && ex.tags) return pretagged_sentence(*ex.tokens, *ex.tags, ex.text, adverbs_eligible);
  return analyze(ex.text, tagger);
}

inline AttackResult attack(std::string_view example, const TaskContext& ctx, Oracle& oracle,
                           const AttackConfig& cfg, const Lexicon& lexicon, const Tagger& tagger) {
  if (example.empty()) throw ConfigError("cannot attack an empty example");
  Rng rng(cfg.rng_seed);
  return attack_tagged(analyze(example, tagger), ctx, oracle, cfg, lexicon, rng);
}

/// Attacks one dataset example; oracle failures come back as a failed
/// result instead of an exception.
inline AttackResult attack_example(const Example& ex, Oracle& oracle, const AttackConfig& cfg,
                                   const Lexicon& lexicon, const Tagger& tagger,
                                   bool adverbs_eligible = false) {
  AttackResult r;
  try {
    const TaggedSentence sent = prepare(ex, tagger, adverbs_eligible);
    Rng rng(derive_seed(cfg.rng_seed, ex.id));
    r = attack_tagged(sent, ex.context, oracle, cfg, lexicon, rng);
  } catch (const Error& e) {
    r = AttackResult{};
    r.original = ex.text;
    r.adversarial = ex.text;
    r.failed = true;
    r.error = e.what();
  }
  r.id = ex.id;
  return r;
}

// ---------------------------------------------------------------------------
// Random baseline

struct RandomResult {
  std::string text;
  std::vector<Substitution> substitutions;
};

/// Replaces every eligible token by a uniform draw from its inflections
/// (the token itself included).
inline RandomResult random_baseline(const TaggedSentence& sent, const Lexicon& lexicon, bool constrain,
                                    Rng& rng) {
  auto surfaces = surfaces_of(sent);
  std::vector<PtbTag> tags;
  for (const auto& t : sent.tokens) tags.push_back(t.tag);
  for (const auto& tok : sent.tokens) {
    if (!is_eligible(tok)) continue;
    const auto cands = candidates_for(tok, lexicon, constrain, false, rng);
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    const auto& c = cands[pick(rng)];
    surfaces[tok.index] = c.surface;
    tags[tok.index] = c.tag;
  }
  return {detokenize_with(sent, surfaces), detail::diff(sent, surfaces, tags)};
}

/// Scores the clean input and one random perturbation of it; reported in
/// the same shape as an attack so the corpus report applies unchanged.
inline AttackResult random_baseline_example(const Example& ex, Oracle& oracle, const AttackConfig& cfg,
                                            const Lexicon& lexicon, const Tagger& tagger,
                                            bool adverbs_eligible = false) {
  AttackResult r;
  r.id = ex.id;
  r.original = ex.text;
  r.adversarial = ex.text;
  try {
    const TaggedSentence sent = prepare(ex, tagger, adverbs_eligible);
    Rng rng(derive_seed(cfg.rng_seed, ex.id));
    RandomResult rr = random_baseline(sent, lexicon, cfg.constrain_upos, rng);
    r.original = detokenize(sent);
    const OracleResponse resp = oracle.score_batch({ex.context, {r.original, rr.text}});
    if (resp.scores.size() != 2) throw ProtocolError("oracle returned the wrong number of scores");
    r.clean_score = resp.scores[0];
    r.adversarial_score = resp.scores[1];
    r.lower_is_worse = resp.lower_is_worse;
    r.queries = 2;
    r.adversarial = std::move(rr.text);
    r.substitutions = std::move(rr.substitutions);
  } catch (const Error& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Corpus driver

struct CorpusReport {
  CorpusScore clean;
  CorpusScore adversarial;
  std::optional<double> relative_decrease;
  std::size_t examples = 0;
  std::size_t failures = 0;
  std::size_t queries = 0;
};

inline json to_json(const CorpusScore& s) {
  return json{{"metric", std::string(to_string(s.metric))}, {"value", s.value}, {"n_examples", s.n_examples}};
}

inline json to_json(const CorpusReport& r) {
  return json{{"clean", to_json(r.clean)},
              {"adversarial", to_json(r.adversarial)},
              {"relative_decrease", r.relative_decrease ? json(*r.relative_decrease) : json(nullptr)}};
}

/// Mean oracle score over the examples that did not fail.
inline CorpusReport summarize(const std::vector<AttackResult>& results, Metric metric) {
  CorpusReport rep;
  rep.clean.metric = rep.adversarial.metric = metric;
  double clean = 0.0, adv = 0.0;
  std::size_t n = 0;
  for (const auto& r : results) {
    ++rep.examples;
    rep.queries += r.queries;
    if (r.failed) {
      ++rep.failures;
      continue;
    }
    clean += r.clean_score;
    adv += r.adversarial_score;
    ++n;
  }
  rep.clean.n_examples = rep.adversarial.n_examples = n;
  if (n > 0) {
    rep.clean.value = clean / static_cast<double>(n);
    rep.adversarial.value = adv / static_cast<double>(n);
    if (rep.clean.value != 0.0) rep.relative_decrease = relative_decrease(rep.clean.value, rep.adversarial.value);
  }
  return rep;
}

/// Runs `fn` over every example with up to `jobs` threads. Results keep
/// input order whatever the scheduling.
inline std::vector<AttackResult> run_corpus(const std::vector<Example>& examples, unsigned jobs,
                                            const std::function<AttackResult(const Example&)>& fn) {
  std::vector<AttackResult> out(examples.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(examples.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < examples.size(); ++i) out[i] = fn(examples[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < examples.size();) out[i] = fn(examples[i]);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

inline std::vector<AttackResult> attack_corpus(const std::vector<Example>& examples, Oracle& oracle,
                                               const AttackConfig& cfg, const Lexicon& lexicon,
                                               const Tagger& tagger, unsigned jobs = 1,
                                               bool adverbs_eligible = false) {
  return run_corpus(examples, jobs, [&](const Example& ex) {
    return attack_example(ex, oracle, cfg, lexicon, tagger, adverbs_eligible);
  });
}

}  // namespace morpheus
