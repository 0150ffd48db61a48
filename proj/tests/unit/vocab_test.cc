#include <gtest/gtest.h>

#include <map>
#include <random>

#include "pasforge/errors.h"
#include "pasforge/synthetic.h"
#include "pasforge/util.h"
#include "pasforge/vocab.h"
#include "test_corpus.h"

namespace pasforge {
namespace {

using testing::CorpusFromText;
using testing::TempDir;

// `n` one-token sentences with lemma `lemma`.
std::string Repeat(const std::string& lemma, const std::string& pos, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    out += "T 0 " + lemma + " " + lemma + " " + pos + " _ O 0\nB 0 0 0 0 -1\n\n";
  }
  return out;
}

TEST(BuildVocab, MinCountOneKeepsEveryLemma) {
  Corpus c = CorpusFromText(Repeat("kuru", "VERB", 1) + Repeat("hon", "NOUN", 2));
  Vocabulary v = BuildVocab(c, VocabKind::kLemma, 1);
  EXPECT_TRUE(v.Find("kuru"));
  EXPECT_TRUE(v.Find("hon"));
  EXPECT_TRUE(v.Find("VERB"));
  EXPECT_TRUE(v.Find(Vocabulary::kPad));
}

TEST(BuildVocab, LemmaSeenFourTimesFallsBackToPos) {
  Corpus c = CorpusFromText(Repeat("hon", "NOUN", 4) + Repeat("inu", "NOUN", 5));
  Vocabulary v = BuildVocab(c, VocabKind::kLemma, 5);
  EXPECT_FALSE(v.Find("hon"));
  EXPECT_TRUE(v.Find("inu"));
  ASSERT_TRUE(v.Find("NOUN"));
  EXPECT_EQ(Lookup(v, "hon", "NOUN"), v.Id("NOUN"));
  EXPECT_EQ(Lookup(v, "inu", "NOUN"), v.Id("inu"));
}

TEST(BuildVocab, MembershipMatchesFrequencyOracle) {
  SyntheticConfig cfg;
  cfg.num_sentences = 120;
  Corpus c = GenerateSynthetic(cfg).corpus;
  std::map<std::string, int> counts;
  std::set<std::string> pos;
  for (const Sentence& s : c) {
    for (const Token& t : s.tokens()) {
      ++counts[t.lemma];
      pos.insert(t.pos);
    }
  }
  for (int min_count : {1, 3, 5, 20}) {
    Vocabulary v = BuildVocab(c, VocabKind::kLemma, min_count);
    for (const auto& [lemma, n] : counts) {
      if (pos.count(lemma)) continue;
      EXPECT_EQ(v.Find(lemma).has_value(), n >= min_count) << lemma << " x" << n;
    }
    for (const std::string& p : pos) EXPECT_TRUE(v.Find(p)) << p;
  }
}

TEST(Lookup, UnknownLemmaAndPosThrows) {
  Corpus c = CorpusFromText(Repeat("hon", "NOUN", 1));
  Vocabulary v = BuildVocab(c, VocabKind::kLemma, 1);
  EXPECT_EQ(Lookup(v, "zzz", "NOUN"), v.Id("NOUN"));
  EXPECT_THROW(Lookup(v, "zzz", "ADJ"), std::out_of_range);
}

TEST(Lookup, HeldOutSyntheticSentenceResolves) {
  SyntheticConfig cfg;
  cfg.num_sentences = 30;
  Vocabulary v = BuildVocab(GenerateSynthetic(cfg).corpus, VocabKind::kLemma, 5);
  cfg.seed = 99;
  for (const Sentence& s : GenerateSynthetic(cfg).corpus) {
    for (const Token& t : s.tokens()) EXPECT_NO_THROW(Lookup(v, t.lemma, t.pos));
  }
}

TEST(Vocabulary, SerializeRoundTrip) {
  Vocabulary v = BuildVocab(CorpusFromText(Repeat("hon", "NOUN", 2)), VocabKind::kLemma, 1);
  Vocabulary back = Vocabulary::Deserialize(v.Serialize());
  EXPECT_EQ(back, v);
  EXPECT_EQ(back.Hash(), v.Hash());
  EXPECT_EQ(DirectionVocab().size(), 5);
}

class PretrainedTest : public ::testing::Test {
 protected:
  void SetUp() override {
    vocab_ = std::make_shared<Vocabulary>(
        BuildVocab(CorpusFromText(Repeat("hon", "NOUN", 1) + Repeat("yomu", "VERB", 1)),
                   VocabKind::kLemma, 1));
  }
  std::shared_ptr<const Vocabulary> vocab_;
  TempDir dir_{"vocab"};
};

TEST_F(PretrainedTest, FullCoverageCopiesEveryRow) {
  std::mt19937_64 rng(1);
  EmbeddingTable t = RandomEmbeddingTable(vocab_, 4, rng);
  SaveWordVectors(dir_ / "v.vec", t);
  PretrainedLoad loaded = LoadPretrained(dir_ / "v.vec", vocab_, 4, rng);
  EXPECT_EQ(loaded.copied_rows, vocab_->size());
  EXPECT_EQ(loaded.table.weights, t.weights);
}

TEST_F(PretrainedTest, EmptyFileLeavesRandomRows) {
  WriteFile(dir_ / "empty.vec", "0 256\n");
  std::mt19937_64 rng(3);
  PretrainedLoad loaded = LoadPretrained(dir_ / "empty.vec", vocab_, 256, rng);
  EXPECT_EQ(loaded.copied_rows, 0);
  EXPECT_EQ(loaded.table.weights.cols(), vocab_->size());
  EXPECT_LE(loaded.table.weights.cwiseAbs().maxCoeff(), kOovInitRange);
  EXPECT_GT(loaded.table.weights.cwiseAbs().maxCoeff(), 0.0f);
}

TEST_F(PretrainedTest, PartialFileAndDimMismatch) {
  WriteFile(dir_ / "p.vec", "2 2\nhon 0.5 -0.25\nunseen 1 1\n");
  std::mt19937_64 rng(3);
  PretrainedLoad loaded = LoadPretrained(dir_ / "p.vec", vocab_, 2, rng);
  EXPECT_EQ(loaded.copied_rows, 1);
  EXPECT_EQ(loaded.table.weights(0, vocab_->Id("hon")), 0.5f);
  EXPECT_EQ(loaded.table.weights(1, vocab_->Id("hon")), -0.25f);
  EXPECT_ANY_THROW(LoadPretrained(dir_ / "p.vec", vocab_, 3, rng));
}

}  // namespace
}  // namespace pasforge
