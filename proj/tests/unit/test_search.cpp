#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "morpheus/search.hpp"
#include "test_support.hpp"

using namespace morpheus;

namespace {

class FnOracle : public Oracle {
 public:
  FnOracle(std::function<double(const std::string&)> fn, bool lower_is_worse)
      : fn_(std::move(fn)), lower_(lower_is_worse) {}
  OracleResponse score_batch(const OracleRequest& req) override {
    ++calls;
    OracleResponse r{{}, lower_};
    for (const auto& c : req.candidates) r.scores.push_back(fn_(c));
    return r;
  }
  std::string identity() const override { return "fn"; }
  int calls = 0;

 private:
  std::function<double(const std::string&)> fn_;
  bool lower_;
};

class BrokenOracle : public Oracle {
 public:
  OracleResponse score_batch(const OracleRequest&) override { throw TransportError("down"); }
  std::string identity() const override { return "broken"; }
};

BagOfTagsOracle toy() { return BagOfTagsOracle(test::tagger(), {{PtbTag::VBG, 1.0}, {PtbTag::NNS, 1.0}}); }

AttackResult run(std::string_view s, Oracle& o, AttackConfig cfg = {}) {
  return attack(s, {}, o, cfg, test::lexicon(), test::tagger());
}

std::vector<std::string> words(std::initializer_list<const char*> w) { return {w.begin(), w.end()}; }

/// Best loss over every combination of candidate surfaces.
double brute_force(const TaggedSentence& sent, const BagOfTagsOracle& oracle) {
  Rng rng(0);
  std::vector<std::vector<InflectionCandidate>> options;
  std::vector<std::size_t> positions;
  for (const auto& t : sent.tokens) {
    if (!is_eligible(t)) continue;
    positions.push_back(t.index);
    options.push_back(candidates_for(t, test::lexicon(), true, false, rng));
  }
  auto surfaces = surfaces_of(sent);
  double best = -1e300;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == positions.size()) {
      best = std::max(best, oracle.loss(detokenize_with(sent, surfaces)));
      return;
    }
    for (const auto& c : options[k]) {
      surfaces[positions[k]] = c.surface;
      rec(k + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST(MaxInflected, PicksTheGerund) {
  auto o = toy();
  const auto sent = analyze("settler arrive", test::tagger());
  const std::vector<InflectionCandidate> cands{
      {"arrive", PtbTag::VB, UPos::VERB},
      {"arrives", PtbTag::VBZ, UPos::VERB},
      {"arriving", PtbTag::VBG, UPos::VERB},
      {"arrived", PtbTag::VBD, UPos::VERB}};
  const auto c = max_inflected(cands, sent, surfaces_of(sent), 1, {}, o, 0.0, false);
  EXPECT_TRUE(c.changed);
  EXPECT_EQ(cands[c.candidate].surface, "arriving");
  EXPECT_EQ(c.queries, 3u);
  EXPECT_DOUBLE_EQ(c.score, 1.0);
}

TEST(MaxInflected, TiesKeepTheIncumbent) {
  FnOracle flat([](const std::string&) { return 0.5; }, false);
  const auto sent = analyze("settler arrive", test::tagger());
  const std::vector<InflectionCandidate> cands{{"arrives", PtbTag::VBZ, UPos::VERB},
                                               {"arrive", PtbTag::VB, UPos::VERB},
                                               {"arriving", PtbTag::VBG, UPos::VERB}};
  const auto c = max_inflected(cands, sent, surfaces_of(sent), 1, {}, flat, 0.5, false);
  EXPECT_FALSE(c.changed);
  EXPECT_EQ(cands[c.candidate].surface, "arrive");
}

TEST(MaxInflected, FirstOfEqualChallengersWins) {
  FnOracle o([](const std::string& s) { return s.find("arrive ") != std::string::npos || s == "settler arrive" ? 0.0 : 1.0; },
             false);
  const auto sent = analyze("settler arrive", test::tagger());
  const std::vector<InflectionCandidate> cands{{"arrived", PtbTag::VBD, UPos::VERB},
                                               {"arrive", PtbTag::VB, UPos::VERB},
                                               {"arriving", PtbTag::VBG, UPos::VERB}};
  const auto c = max_inflected(cands, sent, surfaces_of(sent), 1, {}, o, 0.0, false);
  EXPECT_EQ(cands[c.candidate].surface, "arrived");
}

TEST(Attack, NoEligibleTokens) {
  auto o = toy();
  const auto r = run("Of the on!", o);
  EXPECT_EQ(r.adversarial, r.original);
  EXPECT_EQ(r.queries, 1u);
  EXPECT_TRUE(r.substitutions.empty());
}

TEST(Attack, KeywordTerminatesEarly) {
  KeywordOracle o({"been"});
  const auto r = run("He is here.", o);
  EXPECT_TRUE(r.terminated_early);
  EXPECT_EQ(r.adversarial, "He been here.");
  EXPECT_LE(r.adversarial_score, 0.0);
  EXPECT_FALSE(r.used_reverse_pass);
}

TEST(Attack, UnreachableKeywordNeverTerminates) {
  KeywordOracle o({"zebra"});
  const auto r = run("He is here.", o);
  EXPECT_FALSE(r.terminated_early);
  EXPECT_EQ(r.adversarial, r.original);
}

TEST(Attack, AlreadyFailingInputStopsAtOnce) {
  KeywordOracle o({"he"});
  const auto r = run("He is here.", o);
  EXPECT_TRUE(r.terminated_early);
  EXPECT_EQ(r.queries, 1u);
}

TEST(Attack, SequentialAndParallelAgreeWithBruteForce) {
  auto o = toy();
  for (const char* s : {"The viking settler arrive at the old harbour.", "The children were playing in the old gardens.",
                        "When is the suspended team scheduled to return?"}) {
    const auto sent = analyze(s, test::tagger());
    const double best = brute_force(sent, o);
    AttackConfig seq;
    AttackConfig par;
    par.mode = SearchMode::PARALLEL;
    EXPECT_DOUBLE_EQ(run(s, o, seq).adversarial_score, best) << s;
    EXPECT_DOUBLE_EQ(run(s, o, par).adversarial_score, best) << s;
    EXPECT_EQ(run(s, o, seq).adversarial, run(s, o, par).adversarial) << s;
  }
}

TEST(Attack, TraceIsMonotone) {
  auto o = toy();
  const auto r = run("The children were playing in the old gardens.", o);
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i], r.trace[i - 1]);
  for (std::size_t i = 1; i < r.reverse_trace.size(); ++i) EXPECT_GE(r.reverse_trace[i], r.reverse_trace[i - 1]);
}

TEST(Attack, ReversePassCanWin) {
  // taking "settlers" first blocks the larger gain from "arriving"
  FnOracle o(
      [](const std::string& s) {
        const bool plural = s.find("settlers") != std::string::npos;
        const bool gerund = s.find("arriving") != std::string::npos;
        if (gerund && !plural) return 2.0;
        return plural ? 1.0 : 0.0;
      },
      false);
  AttackConfig cfg;
  cfg.shuffle_inflections = false;
  const auto r = run("settler arrive", o, cfg);
  EXPECT_TRUE(r.used_reverse_pass);
  EXPECT_EQ(r.adversarial, "settler arriving");
  EXPECT_DOUBLE_EQ(r.adversarial_score, 2.0);

  cfg.reverse_retry = false;
  const auto fwd = run("settler arrive", o, cfg);
  EXPECT_FALSE(fwd.used_reverse_pass);
  EXPECT_EQ(fwd.adversarial, "settlers arrive");
}

TEST(Attack, ParallelNeverReturnsSomethingWorse) {
  // each change helps alone, both together hurt
  FnOracle o(
      [](const std::string& s) {
        const bool plural = s.find("settlers") != std::string::npos;
        const bool gerund = s.find("arriving") != std::string::npos;
        if (plural && gerund) return -5.0;
        return plural ? 1.0 : gerund ? 2.0 : 0.0;
      },
      false);
  AttackConfig cfg;
  cfg.mode = SearchMode::PARALLEL;
  const auto r = run("settler arrive", o, cfg);
  EXPECT_EQ(r.adversarial, "settler arriving");
  EXPECT_DOUBLE_EQ(r.adversarial_score, 2.0);
  ASSERT_EQ(r.substitutions.size(), 1u);
  EXPECT_EQ(r.substitutions[0].tag_new, PtbTag::VBG);
}

TEST(Attack, QueryBound) {
  auto o = toy();
  CountingOracle counted(o);
  const std::string s = "The children were playing in the old gardens.";
  const auto r = run(s, counted);
  const auto sent = analyze(s, test::tagger());
  std::size_t sum = 0;
  Rng rng(0);
  for (const auto& t : sent.tokens) {
    if (is_eligible(t)) sum += candidates_for(t, test::lexicon(), true, false, rng).size();
  }
  EXPECT_EQ(r.queries, counted.candidates());
  EXPECT_LE(r.queries, 1 + 2 * sum);
}

TEST(Attack, StructureConserved) {
  auto o = toy();
  const auto r = run("The children were playing in the old gardens.", o);
  const auto before = analyze(r.original, test::tagger());
  const auto after = tokenize(r.adversarial);
  ASSERT_EQ(before.tokens.size(), after.tokens.size());
  for (const auto& s : r.substitutions) {
    EXPECT_EQ(tag_family(s.tag_new), before.tokens[s.index].upos);
    EXPECT_EQ(after.tokens[s.index].surface, s.new_surface);
    EXPECT_EQ(test::lexicon().lemmatize(s.new_surface, tag_family(s.tag_new)),
              test::lexicon().lemmatize(s.original_surface, before.tokens[s.index].upos));
  }
}

TEST(Attack, ShuffleDoesNotChangeStrictMaxima) {
  BagOfTagsOracle o(test::tagger(), {{PtbTag::VBG, 1.0}, {PtbTag::NNS, 0.7}, {PtbTag::JJS, 0.4}});
  AttackConfig on, off;
  off.shuffle_inflections = false;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    on.rng_seed = seed;
    const std::string s = "The old settler arrive at the harbour.";
    EXPECT_EQ(run(s, o, on).adversarial, run(s, o, off).adversarial);
  }
}

TEST(Attack, TaskScoreOracle) {
  // the model answers correctly unless the question contains "were"
  FnOracle o([](const std::string& s) { return s.find(" were ") != std::string::npos ? 0.0 : 1.0; }, true);
  const auto r = run("Who is the king of the Franks?", o);
  EXPECT_TRUE(r.terminated_early);
  EXPECT_EQ(r.adversarial, "Who were the king of the Franks?");
  EXPECT_DOUBLE_EQ(r.clean_score, 1.0);
}

TEST(Attack, InvalidConfig) {
  auto o = toy();
  AttackConfig cfg;
  cfg.failure_threshold = -1;
  EXPECT_THROW(run("x", o, cfg), ConfigError);
  EXPECT_THROW(run("", o), ConfigError);
}

TEST(AttackExample, OracleFailureIsRecorded) {
  BrokenOracle o;
  Example ex;
  ex.id = "q1";
  ex.text = "He is here.";
  const auto r = attack_example(ex, o, {}, test::lexicon(), test::tagger());
  EXPECT_TRUE(r.failed);
  EXPECT_EQ(r.id, "q1");
  EXPECT_NE(r.error.find("down"), std::string::npos);
  EXPECT_EQ(to_json(r)["failed"], true);
}

TEST(AttackExample, PretaggedInput) {
  auto o = toy();
  Example ex;
  ex.id = "p";
  ex.text = "settler arrive";
  ex.tokens = words({"settler", "arrive"});
  ex.tags = words({"NN", "VB"});
  const auto r = attack_example(ex, o, {}, test::lexicon(), test::tagger());
  EXPECT_EQ(r.adversarial, "settlers arriving");
}

TEST(AttackResultJson, RoundTrip) {
  auto o = toy();
  auto r = run("The settler arrive.", o);
  r.id = "x";
  const auto back = attack_result_from_json(to_json(r));
  EXPECT_EQ(back.adversarial, r.adversarial);
  EXPECT_EQ(back.substitutions, r.substitutions);
  EXPECT_EQ(back.queries, r.queries);
  const auto j = to_json(r);
  for (const char* key : {"original", "adversarial", "clean_score", "adversarial_score", "queries",
                          "terminated_early", "used_reverse_pass", "substitutions"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["substitutions"][0]["tag_original"], "NN");
}

TEST(RandomBaseline, ZeroEligibleIsIdentity) {
  Rng rng(1);
  const auto sent = analyze("Of the on!", test::tagger());
  EXPECT_EQ(random_baseline(sent, test::lexicon(), true, rng).text, "Of the on!");
}

TEST(RandomBaseline, Reproducible) {
  const auto sent = analyze("The children were playing in the old gardens.", test::tagger());
  Rng a(42), b(42);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(random_baseline(sent, test::lexicon(), true, a).text, random_baseline(sent, test::lexicon(), true, b).text);
  }
}

TEST(RandomBaseline, UniformOverFourForms) {
  const auto sent = analyze("arrive", test::tagger());
  Rng rng(7);
  std::map<std::string, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) counts[random_baseline(sent, test::lexicon(), true, rng).text]++;
  ASSERT_EQ(counts.size(), 4u);
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (const auto& [s, c] : counts) EXPECT_NEAR(c, n * 0.25, 3 * sigma) << s;
}

TEST(Corpus, OrderAndCountSurviveThreads) {
  auto o = toy();
  std::vector<Example> exs;
  for (int i = 0; i < 40; ++i) {
    Example ex;
    ex.id = "e" + std::to_string(i);
    ex.text = i % 2 ? "The settler arrive at the harbour." : "The children were playing.";
    exs.push_back(ex);
  }
  const auto one = attack_corpus(exs, o, {}, test::lexicon(), test::tagger(), 1);
  const auto four = attack_corpus(exs, o, {}, test::lexicon(), test::tagger(), 4);
  ASSERT_EQ(one.size(), exs.size());
  ASSERT_EQ(four.size(), exs.size());
  for (std::size_t i = 0; i < exs.size(); ++i) {
    EXPECT_EQ(one[i].id, exs[i].id);
    EXPECT_EQ(to_json(one[i]), to_json(four[i]));
  }
}

TEST(Corpus, Report) {
  std::vector<AttackResult> rs(3);
  rs[0].clean_score = 1.0;
  rs[0].adversarial_score = 0.5;
  rs[1].clean_score = 0.5;
  rs[1].adversarial_score = 0.0;
  rs[2].failed = true;
  const auto rep = summarize(rs, Metric::F1);
  EXPECT_DOUBLE_EQ(rep.clean.value, 0.75);
  EXPECT_DOUBLE_EQ(rep.adversarial.value, 0.25);
  ASSERT_TRUE(rep.relative_decrease.has_value());
  EXPECT_NEAR(*rep.relative_decrease, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(rep.failures, 1u);
  EXPECT_EQ(rep.clean.n_examples, 2u);

  const auto empty = summarize({}, Metric::F1);
  EXPECT_EQ(empty.examples, 0u);
  EXPECT_FALSE(empty.relative_decrease.has_value());
  EXPECT_TRUE(to_json(empty)["relative_decrease"].is_null());
}

TEST(Seeds, DerivedPerExample) {
  EXPECT_EQ(derive_seed(1, "a"), derive_seed(1, "a"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
}
