#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pasforge/corpus.h"
#include "pasforge/errors.h"
#include "pasforge/synthetic.h"
#include "oracles.h"
#include "test_corpus.h"

namespace pasforge {
namespace {

using testing::Bfs;
using testing::CorpusFromText;
using testing::RunBfs;
using testing::RandomHeads;
using testing::TreeSentence;

TEST(CorpusParse, MinimalSentence) {
  Corpus c = CorpusFromText(
      "T 0 taberu taberu VERB _ O 0\n"
      "B 0 0 0 0 -1\n"
      "P 0 _ _ NOM=- ACC=- DAT=-\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].num_tokens(), 1);
  ASSERT_EQ(c[0].predicates().size(), 1u);
  for (Case k : kArgCases) EXPECT_FALSE(c[0].predicates()[0].GoldFiller(k).has_value());
}

TEST(CorpusParse, TwoCycleIsRejected) {
  const std::string text =
      "T 0 a a NOUN _ O 0\n"
      "T 1 b b VERB _ O 1\n"
      "B 0 0 0 0 1\n"
      "B 1 1 1 1 0\n";
  try {
    CorpusFromText(text);
    FAIL() << "expected a validation error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos) << e.what();
  }
}

TEST(CorpusParse, ErrorsCarryLineNumbers) {
  try {
    CorpusFromText("T 0 a a NOUN _ O 0\nB 0 0 zero 0 -1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(CorpusParse, GoldFillerMustExist) {
  EXPECT_ANY_THROW(CorpusFromText(
      "T 0 a a NOUN _ O 0\nT 1 b b VERB _ O 0\nB 0 0 1 1 -1\nP 1 _ _ NOM=7 ACC=- DAT=-\n"));
}

TEST(CorpusParse, SyntheticTokenCountsMatchGenerator) {
  SyntheticConfig cfg;
  cfg.num_sentences = 3;
  cfg.seed = 11;
  SyntheticCorpus syn = GenerateSynthetic(cfg);
  Corpus parsed = CorpusFromText(SerializeCorpus(syn.corpus));
  ASSERT_EQ(parsed.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(parsed[i].num_tokens(), syn.stats.token_counts[i]);
}

TEST(CorpusRoundTrip, SerializeParseIsExact) {
  SyntheticConfig cfg;
  cfg.num_sentences = 40;
  cfg.voice_rate = 0.5;
  Corpus c = GenerateSynthetic(cfg).corpus;
  const std::string text = SerializeCorpus(c);
  Corpus back = CorpusFromText(text);
  EXPECT_EQ(back, c);
  EXPECT_EQ(SerializeCorpus(back), text);
}

TEST(BunsetsuPath, SameBunsetsu) {
  Sentence s = TreeSentence({1, -1});
  std::vector<PathStep> p = BunsetsuPath(s, 1, 1);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (PathStep{1, Direction::kEnd}));
}

TEST(BunsetsuPath, Chain) {
  Sentence s = TreeSentence({1, 2, -1});
  std::vector<PathStep> want = {{0, Direction::kUp}, {1, Direction::kUp}, {2, Direction::kEnd}};
  EXPECT_EQ(BunsetsuPath(s, 0, 2), want);
  std::vector<PathStep> back = {{2, Direction::kDown}, {1, Direction::kDown}, {0, Direction::kEnd}};
  EXPECT_EQ(BunsetsuPath(s, 2, 0), back);
}

TEST(BunsetsuPath, MatchesBfsOracleOnRandomTrees) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> heads = RandomHeads(10, rng);
    Sentence s = TreeSentence(heads);
    for (int from = 0; from < 10; ++from) {
      Bfs bfs = RunBfs(heads, from);
      for (int to = 0; to < 10; ++to) {
        // Walk the BFS parents back from `to` to get the route.
        std::vector<int> route;
        for (int v = to; v != -1; v = bfs.parent[v]) route.push_back(v);
        std::reverse(route.begin(), route.end());
        std::vector<PathStep> got = BunsetsuPath(s, from, to);
        ASSERT_EQ(got.size(), route.size()) << "trial " << trial;
        for (std::size_t i = 0; i < route.size(); ++i) {
          EXPECT_EQ(got[i].bunsetsu, route[i]);
          Direction want = Direction::kEnd;
          if (i + 1 < route.size()) {
            want = heads[route[i]] == route[i + 1] ? Direction::kUp : Direction::kDown;
          }
          EXPECT_EQ(got[i].direction, want);
        }
        EXPECT_EQ(DependencyDistance(s, from, to), bfs.dist[to]);
      }
    }
  }
}

TEST(DependencyDistance, Examples) {
  Sentence same = CorpusFromText(
                      "T 0 a a NOUN _ O 0\nT 1 ga ga PART _ O 0\nB 0 0 1 0 -1\n")
                      .at(0);
  EXPECT_EQ(DependencyDistance(same, 0, 1), 0);
  Sentence direct = TreeSentence({1, -1});
  EXPECT_EQ(DependencyDistance(direct, 1, 0), 1);
}

TEST(GoldLabel, Examples) {
  PredicateInstance pred;
  pred.pred_token = 0;
  EXPECT_EQ(GoldLabelOf(pred, 5), Case::kNone);
  pred.gold[CaseIndex(Case::kAcc)] = 5;
  EXPECT_EQ(GoldLabelOf(pred, 5), Case::kAcc);
  pred.gold = {5, std::nullopt, 5};
  EXPECT_EQ(GoldLabelOf(pred, 5), Case::kNom);
}

TEST(CaseNames, RoundTrip) {
  for (Case c : {Case::kNom, Case::kAcc, Case::kDat, Case::kNone}) {
    EXPECT_EQ(CaseFromName(CaseName(c)), c);
  }
  EXPECT_FALSE(CaseFromName("GEN").has_value());
}

}  // namespace
}  // namespace pasforge
