#include <gtest/gtest.h>

#include <sstream>

#include "morpheus/tagger.hpp"
#include "test_support.hpp"

using namespace morpheus;
using test::tags_of;

namespace {

std::string tag(std::string_view s) { return tags_of(analyze(s, test::tagger())); }

}  // namespace

TEST(Tagger, QuestionFromQa) {
  EXPECT_EQ(tag("When is the suspended team scheduled to return?"), "WRB VBZ DT VBN NN VBN TO VB .");
}

TEST(Tagger, ToyOracleSentences) {
  EXPECT_EQ(tag("viking settler arriving"), "NN NN VBG");
  EXPECT_EQ(tag("viking settlers arriving"), "NN NNS VBG");
}

TEST(Tagger, ProperNouns) {
  EXPECT_EQ(tag("Who among the original West Germanic Vikings was a duck?"),
            "WP IN DT JJ NNP NNP NNPS VBD DT NN .");
}

TEST(Tagger, ContextRules) {
  EXPECT_EQ(tag("They walk home."), "PRP VBP NN .");
  EXPECT_EQ(tag("She walks home."), "PRP VBZ NN .");
  EXPECT_EQ(tag("He has walked."), "PRP VBZ VBN .");
  EXPECT_EQ(tag("He walked."), "PRP VBD .");
  EXPECT_EQ(tag("They will return."), "PRP MD VB .");
}

TEST(Tagger, UposFollowsTags) {
  const auto s = analyze("The children quickly played.", test::tagger());
  ASSERT_EQ(s.tokens.size(), 5u);
  EXPECT_EQ(s.tokens[0].upos, UPos::OTHER);
  EXPECT_EQ(s.tokens[1].upos, UPos::NOUN);
  EXPECT_EQ(s.tokens[2].upos, UPos::OTHER);  // adverbs off by default
  EXPECT_EQ(s.tokens[3].upos, UPos::VERB);
  EXPECT_TRUE(s.tagged);
}

TEST(Tagger, UnknownWordGuesses) {
  EXPECT_EQ(tag("the zorbles"), "DT NNS");
  EXPECT_EQ(tag("3.5"), "CD");
  EXPECT_EQ(test::tagger().lexical_tag("blorfing"), PtbTag::VBG);
}

TEST(Tagger, TagTableParsing) {
  std::istringstream in("# comment\nduck\tNN:50,VB:20\n");
  const TagTable t = TagTable::parse(in);
  ASSERT_NE(t.find("Duck"), nullptr);
  EXPECT_EQ(t.find("duck")->front().first, PtbTag::NN);
  std::istringstream bad("duck\tNN:x\n");
  EXPECT_THROW(TagTable::parse(bad), FormatError);
}

TEST(Tagger, PretaggedInput) {
  const auto s = pretagged_sentence({"Birds", "fly", "."}, {"NNS", "VBP", "."}, std::string("Birds fly."));
  EXPECT_EQ(detokenize(s), "Birds fly.");
  EXPECT_EQ(tags_of(s), "NNS VBP .");
  const auto joined = pretagged_sentence({"Birds", "fly"}, {"NNS", "VBP"}, std::nullopt);
  EXPECT_EQ(detokenize(joined), "Birds fly");
  EXPECT_THROW(pretagged_sentence({"a"}, {}, std::nullopt), FormatError);
}
