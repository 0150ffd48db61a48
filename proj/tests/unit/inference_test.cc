#include <gtest/gtest.h>

#include <random>

#include "pasforge/errors.h"
#include "pasforge/inference.h"
#include "pasforge/synthetic.h"
#include "test_corpus.h"

namespace pasforge {
namespace {

using testing::TempDir;
using testing::TreeSentence;

struct Table {
  Sentence sentence = TreeSentence({-1, 0, 0, 0}, {PredicateInstance{}});
  PredicateScores scores;

  Table(std::vector<int> candidates, std::vector<LabelProbs> probs) {
    scores.sentence = &sentence;
    scores.candidates = std::move(candidates);
    scores.probs = std::move(probs);
  }
};

TEST(Decode, AllNoneIsEmpty) {
  Table t({1, 2, 3}, {{0.01, 0.0, 0.0, 0.99}, {0.0, 0.02, 0.0, 0.98}, {0.0, 0.0, 0.03, 0.97}});
  Prediction p = DecodePredicate(t.scores, {0.05, 0.05, 0.05});
  for (const auto& a : p.args) EXPECT_FALSE(a.has_value());
}

TEST(Decode, HandArgmaxAndGate) {
  Table t({1, 2}, {{0.7, 0.1, 0.1, 0.1}, {0.6, 0.1, 0.1, 0.2}});
  Prediction p = DecodePredicate(t.scores, {0.5, 0.5, 0.5});
  ASSERT_TRUE(p.args[0]);
  EXPECT_EQ(p.args[0]->token, 1);
  EXPECT_EQ(p.args[0]->prob, 0.7);
  EXPECT_FALSE(p.args[1]);
  EXPECT_FALSE(DecodePredicate(t.scores, {0.75, 0.5, 0.5}).args[0]);
  // The gate is strict.
  EXPECT_FALSE(DecodePredicate(t.scores, {0.7, 0.5, 0.5}).args[0]);
}

TEST(Decode, TiesGoToSmallerTokenAndCasesAreIndependent) {
  Table t({1, 3}, {{0.45, 0.45, 0.0, 0.1}, {0.45, 0.1, 0.0, 0.45}});
  Prediction p = DecodePredicate(t.scores, {0.0, 0.0, 0.0});
  EXPECT_EQ(p.args[0]->token, 1);
  EXPECT_EQ(p.args[1]->token, 1);  // one token may fill two cases
  EXPECT_FALSE(p.args[2]);         // probability 0 does not exceed 0
}

TEST(Ensemble, MeanExamples) {
  std::vector<LabelProbs> rows = {{1, 0, 0, 0}, {0, 1, 0, 0}};
  EXPECT_EQ(MeanProbabilities(rows), (LabelProbs{0.5, 0.5, 0, 0}));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabelProbs> rs(1 + trial % 6);
    for (auto& r : rs) {
      for (double& v : r) v = u(rng);
    }
    LabelProbs m = MeanProbabilities(rs);
    for (int k = 0; k < kNumLabels; ++k) {
      double sum = 0.0;
      for (const auto& r : rs) sum += r[k];
      EXPECT_NEAR(m[k], sum / rs.size(), 1e-9);
    }
  }
}

class EnsembleModels : public ::testing::Test {
 protected:
  void SetUp() override {
    SyntheticConfig cfg;
    cfg.num_sentences = 10;
    corpus_ = GenerateSynthetic(cfg).corpus;
    lexicon_ = BuildLexicon(corpus_, {}, 1, 2);
    instances_ = MakeInstances(corpus_, lexicon_);
  }
  static ModelConfig Config(std::uint64_t seed) {
    ModelConfig c;
    c.hidden_dim = 10;
    c.gru_hidden = 4;
    c.word_dim = 4;
    c.path_item_dim = 3;
    c.seed = seed;
    return c;
  }
  Corpus corpus_;
  Lexicon lexicon_;
  std::vector<Instance> instances_;
};

TEST_F(EnsembleModels, IdenticalMembersMatchSingleModel) {
  PasModel m(Config(1), lexicon_);
  std::vector<PredicateScores> single = ScoreInstances(m, instances_);
  Ensemble three({m, m, m});
  std::vector<PredicateScores> avg = three.Score(instances_);
  ASSERT_EQ(avg.size(), single.size());
  for (std::size_t i = 0; i < avg.size(); ++i) {
    for (std::size_t c = 0; c < avg[i].probs.size(); ++c) {
      for (int k = 0; k < kNumLabels; ++k) {
        EXPECT_NEAR(avg[i].probs[c][k], single[i].probs[c][k], 1e-7);
      }
    }
  }
}

TEST_F(EnsembleModels, OneMemberIsByteIdentical) {
  PasModel m(Config(1), lexicon_);
  m.thresholds = {0.1, 0.2, 0.3};
  const std::string plain = SerializePredictions(Decode(ScoreInstances(m, instances_), m.thresholds));
  Ensemble one({m});
  EXPECT_EQ(one.thresholds, m.thresholds);
  EXPECT_EQ(SerializePredictions(Decode(one.Score(instances_), one.thresholds)), plain);
}

TEST_F(EnsembleModels, AveragedRowsSumToOne) {
  PasModel a(Config(1), lexicon_), b(Config(2), lexicon_);
  std::vector<const PasModel*> models = {&a, &b};
  std::vector<const ModelInput*> batch;
  for (const Instance& i : instances_) batch.push_back(&i.input);
  for (const LabelProbs& r : EnsembleProbabilities(models, batch)) {
    EXPECT_NEAR(r[0] + r[1] + r[2] + r[3], 1.0, 1e-6);
  }
}

TEST_F(EnsembleModels, IncompatibleMembersAreRejected) {
  PasModel a(Config(1), lexicon_);
  Lexicon other = lexicon_;
  other.features = std::make_shared<FeatureIndex>(std::vector<std::string>{"pred.pos=VERB"}, 1);
  PasModel b(Config(1), other);
  EXPECT_THROW(CheckCompatible(a, b), IncompatibleModelError);
  EXPECT_THROW(Ensemble({a, b}), IncompatibleModelError);
  ModelConfig wide = Config(1);
  wide.hidden_dim = 11;
  EXPECT_THROW(CheckCompatible(a, PasModel(wide, lexicon_)), IncompatibleModelError);
  EXPECT_NO_THROW(CheckCompatible(a, PasModel(Config(9), lexicon_)));
}

TEST(PredictionFormat, RoundTrip) {
  Prediction p;
  p.sentence_id = 12;
  p.pred_token = 7;
  p.args[0] = CaseChoice{3, 0.8125};
  p.args[2] = CaseChoice{0, 0.1 + 0.2};
  const std::string line = FormatPrediction(p);
  EXPECT_EQ(line.rfind("12 7 NOM=3,", 0), 0u) << line;
  EXPECT_NE(line.find("ACC=-"), std::string::npos);
  EXPECT_EQ(ParsePrediction(line), p);
  std::vector<Prediction> all = {p, Prediction{}};
  EXPECT_EQ(ParsePredictions(SerializePredictions(all)), all);
  TempDir dir("pred");
  WritePredictionFile(dir / "p.txt", all);
  EXPECT_EQ(ReadPredictionFile(dir / "p.txt"), all);
  EXPECT_ANY_THROW(ParsePrediction("1 2 NOM=x ACC=- DAT=-"));
}

}  // namespace
}  // namespace pasforge
