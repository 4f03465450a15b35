#pragma once

// The `morpheus` command line: attack, random-baseline, eval, analyze-dist,
// gen-trainset. Exit codes: 0 ok, 1 configuration error, 2 some examples
// failed or were skipped.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morpheus/augment.hpp"
#include "morpheus/dataset.hpp"
#include "morpheus/manifest.hpp"
#include "morpheus/metrics.hpp"
#include "morpheus/oracle.hpp"
#include "morpheus/remote.hpp"
#include "morpheus/resources.hpp"
#include "morpheus/search.hpp"

namespace morpheus {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitPartial = 2 };

// ---------------------------------------------------------------------------
// Oracle construction

struct OracleOptions {
  std::string spec;  // builtin:<name> | http:<url> | stdio:<cmd>
  std::string replay_path;
  std::string metric;  // for metric-replay; default by task
  std::string tag_weights = "VBG=1,NNS=1";
  std::string keywords;
  std::size_t max_batch = 64;
  double timeout_s = 30.0;
  int retries = 2;
};

/// `--oracle` if given, else $MORPHEUS_ORACLE, else http:$MORPHEUS_ORACLE_URL.
inline std::string resolve_oracle_spec(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* s = std::getenv("MORPHEUS_ORACLE"); s && *s) return s;
  if (const char* u = std::getenv("MORPHEUS_ORACLE_URL"); u && *u) return std::string("http:") + u;
  return {};
}

inline std::map<PtbTag, double> parse_tag_weights(const std::string& text) {
  std::map<PtbTag, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = std::string(detail::trim(item));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const auto tag = parse_ptb_tag(t.substr(0, eq));
    if (!tag) throw ConfigError("unknown tag in weights: " + t);
    double w = 1.0;
    if (eq != std::string::npos) {
      try {
        w = std::stod(t.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad weight: " + t);
      }
    }
    out[*tag] = w;
  }
  if (out.empty()) throw ConfigError("no tag weights given");
  return out;
}

inline std::set<std::string> parse_list(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = std::string(detail::trim(item));
    if (!t.empty()) out.insert(t);
  }
  return out;
}

inline std::unique_ptr<Oracle> make_oracle(const OracleOptions& opts, const BuiltinTagger& tagger,
                                           Task task) {
  std::string spec = resolve_oracle_spec(opts.spec);
  if (spec.empty()) throw ConfigError("no oracle: pass --oracle or set MORPHEUS_ORACLE");
  if (spec.starts_with("http://") || spec.starts_with("https://")) spec = "http:" + spec;  // bare url
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("oracle spec needs a kind prefix: " + spec);
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  RemoteOptions remote;
  remote.max_batch = opts.max_batch;
  remote.timeout = std::chrono::milliseconds(static_cast<long long>(opts.timeout_s * 1000));
  remote.retries = opts.retries;
  if (kind == "http") return std::make_unique<HttpOracle>(arg, remote);
  if (kind == "stdio") return std::make_unique<StdioOracle>(arg, remote);
  if (kind != "builtin") throw ConfigError("unknown oracle kind: " + kind);

  if (arg == "metric-replay") {
    Metric metric = task == Task::MT ? Metric::CHRF : Metric::F1;
    if (!opts.metric.empty()) {
      const auto m = parse_metric(opts.metric);
      if (!m || *m == Metric::SCORE) throw ConfigError("metric-replay needs f1, em, bleu or chrf");
      metric = *m;
    }
    ReplayStore store;
    if (!opts.replay_path.empty()) store = ReplayStore::load(opts.replay_path);
    return std::make_unique<MetricReplayOracle>(std::move(store), metric);
  }
  if (arg == "bag-of-tags") {
    return std::make_unique<BagOfTagsOracle>(tagger, parse_tag_weights(opts.tag_weights));
  }
  if (arg == "keyword") {
    const auto kw = parse_list(opts.keywords);
    if (kw.empty()) throw ConfigError("keyword oracle needs --keywords");
    return std::make_unique<KeywordOracle>(kw);
  }
  throw ConfigError("unknown builtin oracle: " + arg);
}

// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string data_dir;
  std::string lexicon;
  std::string tagger = "builtin";
  bool adverbs = false;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::string manifest;
};

struct AttackOptions {
  std::string dataset;
  std::string task;
  std::string mode = "seq";
  bool constrain = true;
  bool shuffle = true;
  bool reverse = true;
  double threshold = 0.0;
  std::string out;
  std::string report;
  OracleOptions oracle;
};

struct EvalOptions {
  std::string dataset;
  std::string task;
  std::string metric;
  std::string predictions;
  std::string adversarial;
  std::string out;
};

struct DistOptions {
  std::string results;
  std::string out;
  std::string plot;
  bool all = false;
};

struct TrainsetCliOptions {
  std::string dataset;
  std::string task;
  int k = 4;
  std::string dist;
  bool uniform = false;
  std::string format = "jsonl";
  std::string out;
};

namespace cli_detail {

inline std::optional<Task> task_option(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto t = parse_task(s);
  if (!t) throw ConfigError("unknown task: " + s);
  return t;
}

inline void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what);
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

/// Output stream: a file when a path is given, else `fallback`.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

inline std::string manifest_path(const CommonOptions& common, const std::string& out) {
  if (!common.manifest.empty()) return common.manifest;
  if (!out.empty() && out != "-") return out + ".manifest.json";
  return {};
}

inline Resources load_resources(const CommonOptions& c) {
  const fs::path dir = c.data_dir.empty() ? default_data_dir() : fs::path(c.data_dir);
  std::optional<fs::path> lex;
  if (!c.lexicon.empty()) lex = c.lexicon;
  if (c.tagger != "builtin" && c.tagger != "pretagged") throw ConfigError("unknown tagger: " + c.tagger);
  return Resources::load(dir, lex, c.adverbs);
}

inline void check_pretagged(const CommonOptions& c, const std::vector<Example>& examples) {
  if (c.tagger != "pretagged") return;
  for (const auto& ex : examples) {
    if (!ex.tokens) throw ConfigError("--tagger pretagged: example " + ex.id + " has no tokens/tags");
  }
}

inline json common_json(const CommonOptions& c) {
  return json{{"data_dir", c.data_dir}, {"lexicon", c.lexicon}, {"tagger", c.tagger},
              {"adverbs", c.adverbs},   {"jobs", c.jobs},       {"seed", c.seed}};
}

inline int run_attack(const CommonOptions& common, const AttackOptions& o, bool random_baseline_only,
                      std::ostream& out, std::ostream& err) {
  require_file(o.dataset, "dataset");
  const auto task = task_option(o.task);
  const auto mode = parse_mode(o.mode);
  if (!mode) throw ConfigError("unknown mode: " + o.mode);
  RunManifest manifest;
  manifest.started = utc_timestamp();
  manifest.command = random_baseline_only ? "random-baseline" : "attack";

  Resources res = load_resources(common);
  Dataset ds = load_dataset(o.dataset, task);
  check_pretagged(common, ds.examples);
  const Task effective = task.value_or(ds.examples.empty() ? Task::GENERIC
                                                           : ds.examples.front().context.task);
  auto oracle = make_oracle(o.oracle, *res.tagger, effective);

  AttackConfig cfg;
  cfg.constrain_upos = o.constrain;
  cfg.mode = *mode;
  cfg.failure_threshold = o.threshold;
  cfg.shuffle_inflections = o.shuffle;
  cfg.reverse_retry = o.reverse;
  cfg.rng_seed = common.seed;
  cfg.validate();

  Output results_out(o.out, out);
  std::vector<AttackResult> results;
  if (random_baseline_only) {
    results = run_corpus(ds.examples, common.jobs, [&](const Example& ex) {
      return random_baseline_example(ex, *oracle, cfg, *res.lexicon, *res.tagger, common.adverbs);
    });
  } else {
    results = attack_corpus(ds.examples, *oracle, cfg, *res.lexicon, *res.tagger, common.jobs,
                            common.adverbs);
  }
  for (const auto& r : results) *results_out << to_json(r).dump() << '\n';
  for (const auto& r : results) {
    if (r.failed) err << "example " << r.id << " failed: " << r.error << '\n';
  }
  for (const auto& f : ds.failures) err << o.dataset << ":" << f.line << ": skipped: " << f.message << '\n';

  const CorpusReport rep = summarize(results, oracle->metric());
  if (!o.report.empty()) {
    std::ofstream rf(o.report);
    if (!rf) throw ConfigError("cannot write report " + o.report);
    rf << to_json(rep).dump(2) << '\n';
  }

  manifest.config = common_json(common);
  manifest.config.update(json{{"task", o.task}, {"mode", o.mode}, {"constrain_upos", o.constrain},
                              {"shuffle_inflections", o.shuffle}, {"reverse_retry", o.reverse},
                              {"failure_threshold", o.threshold}, {"max_batch", o.oracle.max_batch},
                              {"timeout_s", o.oracle.timeout_s}});
  manifest.rng_seed = common.seed;
  manifest.set_dataset(o.dataset);
  manifest.oracle = oracle->identity();
  manifest.examples = rep.examples;
  manifest.failures = rep.failures;
  manifest.skipped = ds.failures.size();
  manifest.queries = rep.queries;
  manifest.extra["lexicon_sha256"] = sha256_file(res.lexicon_path);
  manifest.extra["report"] = to_json(rep);
  manifest.finished = utc_timestamp();
  if (const auto mp = manifest_path(common, o.out); !mp.empty()) manifest.write(mp);
  return rep.failures > 0 || !ds.failures.empty() ? kExitPartial : kExitOk;
}

/// id -> prediction from a JSONL file of {"id", "prediction"}.
inline std::map<std::string, std::string> load_predictions(const std::string& path) {
  require_file(path, "predictions file");
  std::ifstream in(path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      const auto& id = j.at("id");
      out[id.is_string() ? id.get<std::string>() : id.dump()] = j.at("prediction").get<std::string>();
    } catch (const json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline CorpusScore corpus_score(Metric metric, const std::vector<Example>& examples,
                                const std::map<std::string, std::string>& preds) {
  CorpusScore s;
  s.metric = metric;
  std::vector<std::string> hyps, refs;
  double sum = 0.0;
  for (const auto& ex : examples) {
    auto it = preds.find(ex.id);
    if (it == preds.end()) throw FormatError("no prediction for example " + ex.id);
    if (metric == Metric::F1 || metric == Metric::EM) {
      if (ex.context.task != Task::QA) throw ConfigError("f1/em need a qa dataset");
      const QaScore q = qa_score(it->second, std::span<const std::string>(*ex.context.gold_answers));
      sum += metric == Metric::F1 ? q.f1 : q.exact_match;
    } else {
      if (ex.context.task != Task::MT) throw ConfigError("bleu/chrf need an mt dataset");
      hyps.push_back(it->second);
      refs.push_back(*ex.context.reference);
    }
    ++s.n_examples;
  }
  if (s.n_examples == 0) return s;
  if (metric == Metric::F1 || metric == Metric::EM) {
    s.value = sum / static_cast<double>(s.n_examples);
  } else if (metric == Metric::BLEU) {
    s.value = bleu(hyps, refs);
  } else {
    s.value = chrf(hyps, refs);
  }
  return s;
}

inline int run_eval(const CommonOptions& common, const EvalOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.dataset, "dataset");
  const auto metric = parse_metric(o.metric);
  if (!metric || *metric == Metric::SCORE) throw ConfigError("--metric must be f1, em, bleu or chrf");
  Dataset ds = load_dataset(o.dataset, task_option(o.task));
  const auto clean = corpus_score(*metric, ds.examples, load_predictions(o.predictions));
  json report;
  if (o.adversarial.empty()) {
    report = to_json(clean);
  } else {
    CorpusReport rep;
    rep.clean = clean;
    rep.adversarial = corpus_score(*metric, ds.examples, load_predictions(o.adversarial));
    if (clean.value != 0.0) rep.relative_decrease = relative_decrease(clean.value, rep.adversarial.value);
    report = to_json(rep);
  }
  Output dst(o.out, out);
  *dst << report.dump(2) << '\n';
  for (const auto& f : ds.failures) err << o.dataset << ":" << f.line << ": skipped: " << f.message << '\n';

  if (const auto mp = manifest_path(common, o.out); !mp.empty()) {
    RunManifest m;
    m.command = "eval";
    m.started = m.finished = utc_timestamp();
    m.config = json{{"metric", o.metric}, {"predictions", o.predictions}, {"adversarial", o.adversarial}};
    m.set_dataset(o.dataset);
    m.examples = clean.n_examples;
    m.skipped = ds.failures.size();
    m.write(mp);
  }
  return ds.failures.empty() ? kExitOk : kExitPartial;
}

inline int run_analyze(const CommonOptions& common, const DistOptions& o, std::ostream& out, std::ostream& err) {
  require_file(o.results, "results file");
  std::ifstream in(o.results);
  std::vector<AttackResult> results;
  std::size_t skipped = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    try {
      results.push_back(attack_result_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      err << o.results << ":" << lineno << ": skipped: " << e.what() << '\n';
      ++skipped;
    }
  }
  const auto dist = compute_distribution(results, !o.all);
  if (dist.empty()) err << "warning: the distribution is empty\n";
  {
    Output dst(o.out, out);
    *dst << to_json(dist).dump(2) << '\n';
  }
  if (!o.plot.empty()) {
    std::ofstream csv(o.plot);
    if (!csv) throw ConfigError("cannot write " + o.plot);
    csv << "tag,count,fraction\n";
    const auto norm = dist.normalized();
    for (const auto& [tag, w] : dist.weights) {
      csv << to_string(tag) << ',' << w << ',' << std::setprecision(6) << norm.at(tag) << '\n';
    }
  }
  if (const auto mp = manifest_path(common, o.out); !mp.empty()) {
    RunManifest m;
    m.command = "analyze-dist";
    m.started = m.finished = utc_timestamp();
    m.config = json{{"filter_degrading", !o.all}};
    m.set_dataset(o.results);
    m.examples = results.size();
    m.skipped = skipped;
    m.extra["distribution_sha256"] = distribution_hash(dist);
    m.write(mp);
  }
  return skipped ? kExitPartial : kExitOk;
}

inline int run_trainset(const CommonOptions& common, const TrainsetCliOptions& o, std::ostream& out,
                        std::ostream& err) {
  require_file(o.dataset, "dataset");
  const auto format = parse_trainset_format(o.format);
  if (!format) throw ConfigError("unknown format: " + o.format);
  if (o.k < 1) throw ConfigError("--k must be at least 1");
  InflectionDistribution dist;
  if (!o.dist.empty()) {
    require_file(o.dist, "distribution file");
    dist = load_distribution(o.dist);
  } else if (!o.uniform) {
    throw ConfigError("gen-trainset needs --dist or --uniform");
  }
  if (!o.uniform && dist.empty()) err << "warning: empty distribution, sampling uniformly\n";
  if (*format == TrainsetFormat::PARALLEL && (o.out.empty() || o.out == "-")) {
    throw ConfigError("parallel format needs --out PREFIX");
  }

  RunManifest manifest;
  manifest.started = utc_timestamp();
  manifest.command = "gen-trainset";
  Resources res = load_resources(common);

  TrainsetOptions topts;
  topts.k = o.k;
  topts.uniform = o.uniform;
  topts.seed = common.seed;
  topts.task = task_option(o.task);
  topts.jobs = common.jobs;
  topts.adverbs_eligible = common.adverbs;

  std::ifstream in(o.dataset);
  TrainsetStats stats;
  if (*format == TrainsetFormat::PARALLEL) {
    std::ofstream src(o.out + ".src", std::ios::binary), tgt(o.out + ".tgt", std::ios::binary);
    if (!src || !tgt) throw ConfigError("cannot write " + o.out + ".src/.tgt");
    ParallelTrainsetWriter w(src, tgt);
    stats = generate_trainset(in, dist, *res.lexicon, *res.tagger, w, topts);
  } else {
    Output dst(o.out, out);
    std::unique_ptr<TrainsetWriter> w;
    if (*format == TrainsetFormat::SQUAD) {
      w = std::make_unique<SquadTrainsetWriter>(*dst);
    } else {
      w = std::make_unique<JsonlTrainsetWriter>(*dst);
    }
    stats = generate_trainset(in, dist, *res.lexicon, *res.tagger, *w, topts);
  }
  for (const auto& f : stats.skipped) err << o.dataset << ":" << f.line << ": skipped: " << f.message << '\n';

  manifest.config = common_json(common);
  manifest.config.update(json{{"k", o.k}, {"uniform", o.uniform}, {"format", o.format}, {"task", o.task}});
  manifest.rng_seed = common.seed;
  manifest.set_dataset(o.dataset);
  manifest.examples = stats.inputs;
  manifest.skipped = stats.skipped.size();
  manifest.extra["records"] = stats.records;
  manifest.extra["distribution_sha256"] = distribution_hash(dist);
  manifest.extra["lexicon_sha256"] = sha256_file(res.lexicon_path);
  manifest.finished = utc_timestamp();
  if (const auto mp = manifest_path(common, o.out); !mp.empty()) manifest.write(mp);
  return stats.skipped.empty() ? kExitOk : kExitPartial;
}

inline void add_oracle_flags(CLI::App* sub, OracleOptions& o) {
  sub->add_option("--oracle", o.spec, "builtin:<name>, http:<url> or stdio:<cmd>");
  sub->add_option("--replay", o.replay_path, "JSONL of {input, prediction} for builtin:metric-replay");
  sub->add_option("--metric", o.metric, "metric-replay scoring: f1, em, bleu, chrf");
  sub->add_option("--tag-weights", o.tag_weights, "bag-of-tags weights, e.g. VBG=1,NNS=1")->capture_default_str();
  sub->add_option("--keywords", o.keywords, "comma-separated trigger forms for builtin:keyword");
  sub->add_option("--max-batch", o.max_batch, "candidates per remote request")->capture_default_str();
  sub->add_option("--timeout", o.timeout_s, "seconds per remote request")->capture_default_str();
  sub->add_option("--retries", o.retries, "retries after a transport failure")->capture_default_str();
}

}  // namespace cli_detail

/// Entry point. `out`/`err` receive what would go to stdout/stderr.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"Inflectional adversarial examples for NLP models", "morpheus"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file mirroring the command-line flags");

  CommonOptions common;
  app.add_option("--data-dir", common.data_dir, "directory holding lexicon.tsv and tagger.tsv");
  app.add_option("--lexicon", common.lexicon, "inflection lexicon (default: $MORPHEUS_LEXICON or data dir)");
  app.add_option("--tagger", common.tagger, "builtin or pretagged")->capture_default_str();
  app.add_flag("--adverbs", common.adverbs, "treat adverbs as perturbable");
  app.add_option("--jobs,-j", common.jobs, "examples processed in parallel")->capture_default_str();
  app.add_option("--seed", common.seed, "random seed")->capture_default_str();
  app.add_option("--manifest", common.manifest, "where to write the run manifest");

  AttackOptions attack_opts;
  auto* attack_cmd = app.add_subcommand("attack", "search for adversarial inflections");
  auto* random_cmd = app.add_subcommand("random-baseline", "score one random inflection per example");
  for (auto* sub : {attack_cmd, random_cmd}) {
    sub->add_option("dataset,--dataset", attack_opts.dataset, "JSONL dataset");
    sub->add_option("--task", attack_opts.task, "qa, mt or generic (default: detect)");
    sub->add_option("--out,-o", attack_opts.out, "results JSONL (default stdout)");
    sub->add_option("--report", attack_opts.report, "corpus report JSON");
    sub->add_flag("--constrain,!--no-constrain", attack_opts.constrain, "keep each word's UPOS")
        ->capture_default_str();
    add_oracle_flags(sub, attack_opts.oracle);
  }
  attack_cmd->add_option("--mode", attack_opts.mode, "seq or par")->capture_default_str();
  attack_cmd->add_flag("--shuffle,!--no-shuffle", attack_opts.shuffle, "shuffle each token's candidates");
  attack_cmd->add_flag("--reverse,!--no-reverse", attack_opts.reverse, "retry right-to-left");
  attack_cmd->add_option("--threshold", attack_opts.threshold, "task score counted as failure")
      ->capture_default_str();

  EvalOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against a dataset");
  eval_cmd->add_option("dataset,--dataset", eval_opts.dataset, "JSONL dataset");
  eval_cmd->add_option("--task", eval_opts.task, "qa, mt or generic (default: detect)");
  eval_cmd->add_option("--metric", eval_opts.metric, "f1, em, bleu or chrf")->required();
  eval_cmd->add_option("--predictions", eval_opts.predictions, "JSONL of {id, prediction}")->required();
  eval_cmd->add_option("--adversarial", eval_opts.adversarial, "predictions on adversarial inputs");
  eval_cmd->add_option("--out,-o", eval_opts.out, "report JSON (default stdout)");

  DistOptions dist_opts;
  auto* dist_cmd = app.add_subcommand("analyze-dist", "histogram the inflections adversaries used");
  dist_cmd->add_option("results,--results", dist_opts.results, "attack results JSONL");
  dist_cmd->add_option("--out,-o", dist_opts.out, "distribution JSON (default stdout)");
  dist_cmd->add_option("--plot", dist_opts.plot, "histogram CSV");
  dist_cmd->add_flag("--all", dist_opts.all, "count every result, not just degrading ones");

  TrainsetCliOptions ts_opts;
  auto* ts_cmd = app.add_subcommand("gen-trainset", "augment a dataset with random inflections");
  ts_cmd->add_option("dataset,--dataset", ts_opts.dataset, "JSONL dataset");
  ts_cmd->add_option("--task", ts_opts.task, "qa, mt or generic (default: detect)");
  ts_cmd->add_option("--k", ts_opts.k, "adversarial variants per example")->capture_default_str();
  ts_cmd->add_option("--dist", ts_opts.dist, "distribution JSON from analyze-dist");
  ts_cmd->add_flag("--uniform", ts_opts.uniform, "ignore weights, sample tags uniformly");
  ts_cmd->add_option("--format", ts_opts.format, "jsonl, squad or parallel")->capture_default_str();
  ts_cmd->add_option("--out,-o", ts_opts.out, "output file (prefix for parallel)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*attack_cmd) return run_attack(common, attack_opts, false, out, err);
    if (*random_cmd) return run_attack(common, attack_opts, true, out, err);
    if (*eval_cmd) return run_eval(common, eval_opts, out, err);
    if (*dist_cmd) return run_analyze(common, dist_opts, out, err);
    if (*ts_cmd) return run_trainset(common, ts_opts, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace morpheus
