#pragma once

// The black-box boundary. The attack only ever sees an Oracle: a batch of
// candidate inputs goes in, one score per candidate comes out.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "morpheus/error.hpp"
#include "morpheus/metrics.hpp"
#include "morpheus/pos.hpp"
#include "morpheus/tagger.hpp"
#include "morpheus/tokenizer.hpp"

namespace morpheus {

using json = nlohmann::json;

enum class Task { QA, MT, GENERIC };

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::QA: return "qa";
    case Task::MT: return "mt";
    case Task::GENERIC: return "generic";
  }
  return "generic";
}

inline std::optional<Task> parse_task(std::string_view s) {
  const std::string l = to_lower(s);
  if (l == "qa") return Task::QA;
  if (l == "mt") return Task::MT;
  if (l == "generic") return Task::GENERIC;
  return std::nullopt;
}

/// Ground truth and side inputs the model needs besides the candidate text.
struct TaskContext {
  Task task = Task::GENERIC;
  std::optional<std::string> passage;
  std::optional<std::vector<std::string>> gold_answers;
  std::optional<std::string> reference;
  std::optional<std::string> label;

  /// Throws ProtocolError when a field the task requires is missing.
  void validate() const {
    if (task == Task::QA && (!passage || !gold_answers)) {
      throw ProtocolError("qa context needs passage and gold_answers");
    }
    if (task == Task::MT && !reference) throw ProtocolError("mt context needs reference");
  }
};

struct OracleRequest {
  TaskContext context;
  std::vector<std::string> candidates;
};

struct OracleResponse {
  std::vector<double> scores;
  bool lower_is_worse = true;
};

/// Maps a raw oracle score onto "higher is more adversarial".
constexpr double objective(double score, bool lower_is_worse) {
  return lower_is_worse ? -score : score;
}

// ---------------------------------------------------------------------------
// Wire format

inline json to_json(const TaskContext& ctx) {
  json j;
  j["task"] = std::string(to_string(ctx.task));
  if (ctx.passage) j["passage"] = *ctx.passage;
  if (ctx.gold_answers) j["gold_answers"] = *ctx.gold_answers;
  if (ctx.reference) j["reference"] = *ctx.reference;
  if (ctx.label) j["label"] = *ctx.label;
  return j;
}

inline json to_json(const OracleRequest& req) {
  json j = to_json(req.context);
  j["candidates"] = req.candidates;
  return j;
}

inline json to_json(const OracleResponse& resp) {
  return json{{"scores", resp.scores}, {"lower_is_worse", resp.lower_is_worse}};
}

inline TaskContext context_from_json(const json& j) {
  TaskContext ctx;
  const auto task = parse_task(j.value("task", std::string("generic")));
  if (!task) throw ProtocolError("unknown task '" + j.value("task", std::string()) + "'");
  ctx.task = *task;
  if (j.contains("passage") && j["passage"].is_string()) ctx.passage = j["passage"].get<std::string>();
  if (j.contains("gold_answers") && j["gold_answers"].is_array()) {
    ctx.gold_answers = j["gold_answers"].get<std::vector<std::string>>();
  }
  if (j.contains("reference") && j["reference"].is_string()) {
    ctx.reference = j["reference"].get<std::string>();
  }
  if (j.contains("label") && j["label"].is_string()) ctx.label = j["label"].get<std::string>();
  return ctx;
}

inline OracleRequest request_from_json(const json& j) {
  if (!j.is_object() || !j.contains("candidates") || !j["candidates"].is_array()) {
    throw ProtocolError("request lacks a candidates array");
  }
  OracleRequest req;
  req.context = context_from_json(j);
  try {
    req.candidates = j["candidates"].get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw ProtocolError("candidates must be strings");
  }
  if (req.candidates.empty()) throw ProtocolError("request has no candidates");
  return req;
}

/// Parses and checks a response: one finite score per candidate.
inline OracleResponse response_from_json(const json& j, std::size_t expected) {
  if (!j.is_object() || !j.contains("scores") || !j["scores"].is_array()) {
    throw ProtocolError("response lacks a scores array");
  }
  OracleResponse resp;
  for (const auto& s : j["scores"]) {
    if (!s.is_number()) throw ProtocolError("non-numeric score");
    const double v = s.get<double>();
    if (!std::isfinite(v)) throw ProtocolError("non-finite score");
    resp.scores.push_back(v);
  }
  if (resp.scores.size() != expected) {
    throw ProtocolError("expected " + std::to_string(expected) + " scores, got " +
                        std::to_string(resp.scores.size()));
  }
  if (j.contains("lower_is_worse")) {
    if (!j["lower_is_worse"].is_boolean()) throw ProtocolError("lower_is_worse must be boolean");
    resp.lower_is_worse = j["lower_is_worse"].get<bool>();
  }
  return resp;
}

// ---------------------------------------------------------------------------

class Oracle {
 public:
  virtual ~Oracle() = default;
  /// One score per candidate, in candidate order. Implementations must be
  /// safe to call from several threads.
  virtual OracleResponse score_batch(const OracleRequest& request) = 0;
  virtual std::string identity() const = 0;
  virtual Metric metric() const { return Metric::SCORE; }
};

// ---------------------------------------------------------------------------
// Builtin oracles

/// Stored model outputs, keyed by the exact input text.
class ReplayStore {
 public:
  static ReplayStore load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open replay file " + path.string());
    ReplayStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      try {
        const auto j = json::parse(line);
        store.add(j.at("input").get<std::string>(), j.at("prediction").get<std::string>());
      } catch (const json::exception& e) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return store;
  }

  void add(std::string input, std::string prediction) {
    predictions_[std::move(input)] = std::move(prediction);
  }

  const std::string* find(const std::string& input) const {
    auto it = predictions_.find(input);
    return it == predictions_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return predictions_.size(); }

 private:
  std::unordered_map<std::string, std::string> predictions_;
};

/// Scores stored predictions with a task metric. Inputs with no stored
/// prediction are assumed answered perfectly (first gold answer / the
/// reference), so only recorded failures register as damage.
class MetricReplayOracle : public Oracle {
 public:
  MetricReplayOracle(ReplayStore store, Metric metric) : store_(std::move(store)), metric_(metric) {}

  OracleResponse score_batch(const OracleRequest& req) override {
    req.context.validate();
    if (req.context.task == Task::GENERIC) {
      throw ProtocolError("metric-replay oracle needs a qa or mt context");
    }
    OracleResponse resp;
    resp.lower_is_worse = true;
    for (const auto& c : req.candidates) resp.scores.push_back(score_one(req.context, c));
    return resp;
  }

  std::string identity() const override {
    return "builtin:metric-replay(" + std::string(to_string(metric_)) + ")";
  }
  Metric metric() const override { return metric_; }

 private:
  double score_one(const TaskContext& ctx, const std::string& candidate) const {
    const std::string* pred = store_.find(candidate);
    if (ctx.task == Task::QA) {
      const auto& golds = *ctx.gold_answers;
      const std::string fallback = golds.empty() ? std::string() : golds.front();
      const QaScore s = qa_score(pred ? *pred : fallback, std::span<const std::string>(golds));
      return metric_ == Metric::EM ? s.exact_match : s.f1;
    }
    const std::string& hyp = pred ? *pred : *ctx.reference;
    return metric_ == Metric::BLEU ? sentence_bleu(hyp, *ctx.reference)
                                   : sentence_chrf(hyp, *ctx.reference);
  }

  ReplayStore store_;
  Metric metric_;
};

/// Additive toy loss: the sum of per-tag weights over the context-free tags
/// of the candidate's tokens. Its optimum can be found by enumeration.
class BagOfTagsOracle : public Oracle {
 public:
  BagOfTagsOracle(const BuiltinTagger& tagger, std::map<PtbTag, double> weights)
      : tagger_(&tagger), weights_(std::move(weights)) {}

  OracleResponse score_batch(const OracleRequest& req) override {
    OracleResponse resp;
    resp.lower_is_worse = false;
    for (const auto& c : req.candidates) resp.scores.push_back(loss(c));
    return resp;
  }

  double loss(std::string_view text) const {
    double total = 0.0;
    for (const auto& tok : tokenize(text).tokens) {
      auto it = weights_.find(tagger_->lexical_tag(tok.surface));
      if (it != weights_.end()) total += it->second;
    }
    return total;
  }

  std::string identity() const override {
    std::string id = "builtin:bag-of-tags(";
    bool first = true;
    for (const auto& [t, w] : weights_) {
      if (!first) id += ',';
      first = false;
      id += std::string(to_string(t)) + "=" + json(w).dump();
    }
    return id + ")";
  }

 private:
  const BuiltinTagger* tagger_;
  std::map<PtbTag, double> weights_;
};

/// Task score 1 normally, 0 (model failure) once any trigger surface form
/// appears in the candidate. Matching is case-insensitive on whole tokens.
class KeywordOracle : public Oracle {
 public:
  explicit KeywordOracle(const std::set<std::string>& keywords) {
    for (const auto& k : keywords) keywords_.insert(to_lower(k));
  }

  OracleResponse score_batch(const OracleRequest& req) override {
    OracleResponse resp;
    resp.lower_is_worse = true;
    for (const auto& c : req.candidates) resp.scores.push_back(triggered(c) ? 0.0 : 1.0);
    return resp;
  }

  bool triggered(std::string_view text) const {
    for (const auto& tok : tokenize(text).tokens) {
      if (keywords_.count(to_lower(tok.surface))) return true;
    }
    return false;
  }

  std::string identity() const override {
    std::string id = "builtin:keyword(";
    bool first = true;
    for (const auto& k : keywords_) {
      if (!first) id += ',';
      first = false;
      id += k;
    }
    return id + ")";
  }

 private:
  std::set<std::string> keywords_;
};

/// Counts candidates scored; wraps any oracle.
class CountingOracle : public Oracle {
 public:
  explicit CountingOracle(Oracle& inner) : inner_(&inner) {}
  OracleResponse score_batch(const OracleRequest& req) override {
    calls_ += 1;
    candidates_ += req.candidates.size();
    return inner_->score_batch(req);
  }
  std::string identity() const override { return inner_->identity(); }
  Metric metric() const override { return inner_->metric(); }
  std::size_t calls() const { return calls_.load(); }
  std::size_t candidates() const { return candidates_.load(); }

 private:
  Oracle* inner_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> candidates_{0};
};

}  // namespace morpheus
