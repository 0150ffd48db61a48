#include <gtest/gtest.h>

#include <random>

#include "pasforge/errors.h"
#include "pasforge/model.h"
#include "pasforge/synthetic.h"
#include "pasforge/training.h"
#include "test_corpus.h"

namespace pasforge {
namespace {

using testing::TempDir;

ModelConfig TinyConfig(std::string_view name = "WBP-Shwartz") {
  ModelConfig c;
  ApplyModelName(name, c);
  c.hidden_dim = 12;
  c.gru_hidden = 5;
  c.word_dim = 6;
  c.path_item_dim = 4;
  return c;
}

class ModelTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SyntheticConfig cfg;
    cfg.num_sentences = 25;
    corpus_ = new Corpus(GenerateSynthetic(cfg).corpus);
    lexicon_ = new Lexicon(BuildLexicon(*corpus_, {}, 1, 2));
    instances_ = new std::vector<Instance>(MakeInstances(*corpus_, *lexicon_));
  }
  static void TearDownTestSuite() {
    delete instances_;
    delete lexicon_;
    delete corpus_;
  }

  // ModelInput with an n-item path over arbitrary valid ids.
  static ModelInput PathInput(int n) {
    ModelInput in = (*instances_)[0].input;
    const int noun = lexicon_->lemmas->Id("NOUN");
    const int up = lexicon_->directions->Id(DirectionSymbol(Direction::kUp));
    in.path_pos.assign(n, noun);
    in.path_lemma.assign(n, noun);
    in.path_dir.assign(n, up);
    return in;
  }

  static std::vector<const ModelInput*> Batch(int n) {
    std::vector<const ModelInput*> b;
    for (int i = 0; i < n; ++i) b.push_back(&(*instances_)[i].input);
    return b;
  }

  static Corpus* corpus_;
  static Lexicon* lexicon_;
  static std::vector<Instance>* instances_;
};

Corpus* ModelTest::corpus_ = nullptr;
Lexicon* ModelTest::lexicon_ = nullptr;
std::vector<Instance>* ModelTest::instances_ = nullptr;

TEST(ModelConfig, Names) {
  ModelConfig c;
  ApplyModelName("B", c);
  EXPECT_FALSE(c.use_word_emb);
  EXPECT_EQ(c.path_variant, PathVariant::kNone);
  EXPECT_TRUE(c.use_binary);
  EXPECT_EQ(c.Name(), "B");
  ApplyModelName("WBP-Roth", c);
  EXPECT_EQ(c.Name(), "WBP-Roth");
  ApplyModelName("BP", c);
  EXPECT_EQ(c.path_variant, PathVariant::kShwartz);
  EXPECT_ANY_THROW(ApplyModelName("XQ", c));
}

TEST(ModelConfig, SerializeRoundTrip) {
  ModelConfig c = TinyConfig("WBP-Roth");
  c.binary_template_ablations = {TemplateGroup::kWord, TemplateGroup::kPath};
  c.dropout = 0.35;
  c.seed = 42;
  EXPECT_EQ(ModelConfig::Parse(c.Serialize()), c);
}

TEST(ModelConfig, ValidateRejectsEmptyModel) {
  ModelConfig c;
  c.use_word_emb = false;
  c.use_binary = false;
  c.path_variant = PathVariant::kNone;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST_F(ModelTest, TimestepsPerEncoder) {
  PasModel roth(TinyConfig("WBP-Roth"), *lexicon_);
  PasModel shw(TinyConfig("WBP-Shwartz"), *lexicon_);
  EXPECT_EQ(roth.PathTimesteps(PathInput(1)), 3);
  EXPECT_EQ(roth.PathTimesteps(PathInput(15)), 45);
  EXPECT_EQ(shw.PathTimesteps(PathInput(1)), 1);
  EXPECT_EQ(shw.PathTimesteps(PathInput(15)), 15);
  EXPECT_EQ(roth.GruInputDim(), 4);
  EXPECT_EQ(shw.GruInputDim(), 12);
}

TEST_F(ModelTest, ZeroWeightGruEncodesZero) {
  PasModel roth(TinyConfig("WBP-Roth"), *lexicon_);
  for (nn::Parameter<float>* p : roth.gru.Parameters()) p->value.setZero();
  for (int n : {1, 4, 15}) EXPECT_EQ(roth.EncodePathRoth(PathInput(n)), Eigen::VectorXf::Zero(5));
}

TEST_F(ModelTest, EncodersArePure) {
  PasModel shw(TinyConfig(), *lexicon_);
  ModelInput in = PathInput(6);
  EXPECT_EQ(shw.EncodePathShwartz(in), shw.EncodePathShwartz(in));
}

TEST_F(ModelTest, PredictRowsAreDistributions) {
  PasModel m(TinyConfig(), *lexicon_);
  Eigen::MatrixXf p = m.Predict(Batch(40));
  ASSERT_EQ(p.rows(), kNumLabels);
  for (int b = 0; b < p.cols(); ++b) EXPECT_NEAR(p.col(b).sum(), 1.0f, 1e-6f);
}

TEST_F(ModelTest, BinaryOnlyIdenticalFeaturesGiveIdenticalRows) {
  PasModel m(TinyConfig("B"), *lexicon_);
  ModelInput a = (*instances_)[3].input;
  ModelInput b = a;
  b.cand_word = a.pred_word;  // word embeddings are not part of a B-only model
  std::vector<const ModelInput*> batch = {&a, &b};
  Eigen::MatrixXf p = m.Predict(batch);
  EXPECT_EQ(p.col(0), p.col(1));
}

TEST_F(ModelTest, SeededConstructionIsBitwiseReproducible) {
  PasModel a(TinyConfig(), *lexicon_);
  PasModel b(TinyConfig(), *lexicon_);
  EXPECT_EQ(a.Predict(Batch(30)), b.Predict(Batch(30)));
  ModelConfig other = TinyConfig();
  other.seed = 2;
  PasModel c(other, *lexicon_);
  EXPECT_NE(a.Predict(Batch(30)), c.Predict(Batch(30)));
}

TEST_F(ModelTest, TrainStepReducesLossOnFixedBatch) {
  PasModel m(TinyConfig(), *lexicon_);
  std::vector<const ModelInput*> batch = Batch(32);
  std::vector<int> labels;
  for (int i = 0; i < 32; ++i) labels.push_back((*instances_)[i].label());
  std::mt19937_64 rng(1);
  const float first = m.TrainStep(batch, labels, rng);
  m.ZeroGrad();
  float last = first;
  for (int i = 0; i < 30; ++i) {
    last = m.TrainStep(batch, labels, rng);
    nn::AdamConfig cfg;
    cfg.lr = 0.01;
    std::vector<nn::Parameter<float>*> ps = m.Parameters();
    nn::AdamStep<float>(ps, cfg);
  }
  EXPECT_LT(last, first);
}

TEST_F(ModelTest, AblationMismatchIsRejected) {
  ModelConfig c = TinyConfig();
  c.binary_template_ablations = {TemplateGroup::kCases};
  EXPECT_THROW(PasModel(c, *lexicon_), ConfigError);
}

TEST_F(ModelTest, MalformedInputThrowsShapeError) {
  PasModel m(TinyConfig(), *lexicon_);
  ModelInput bad = (*instances_)[0].input;
  bad.features.push_back(lexicon_->features->size() + 3);
  std::vector<const ModelInput*> batch = {&bad};
  EXPECT_THROW(m.Predict(batch), ShapeError);
}

TEST_F(ModelTest, SaveLoadIsBitwise) {
  TempDir dir("model");
  PasModel m(TinyConfig("WBP-Roth"), *lexicon_);
  std::mt19937_64 rng(3);
  std::vector<const ModelInput*> batch = Batch(16);
  std::vector<int> labels(16, CaseIndex(Case::kNone));
  m.TrainStep(batch, labels, rng);  // moves the running statistics
  m.thresholds = {0.15, 0.5, 0.95};
  SaveModel(m, dir.path());
  PasModel back = LoadModel(dir.path());
  EXPECT_EQ(back.config(), m.config());
  EXPECT_EQ(back.thresholds, m.thresholds);
  EXPECT_EQ(back.Predict(Batch(60)), m.Predict(Batch(60)));
  auto a = m.StateTensors();
  auto b = back.StateTensors();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].first, b[i].first);
    EXPECT_EQ(*a[i].second, *b[i].second) << a[i].first;
  }
}

TEST_F(ModelTest, LoadWithWrongFeatureIndexFails) {
  TempDir dir("model");
  PasModel m(TinyConfig(), *lexicon_);
  SaveModel(m, dir.path());
  FeatureIndex other({"pred.pos=VERB"}, 1);
  EXPECT_THROW(LoadModel(dir.path(), &other), IncompatibleModelError);
  EXPECT_NO_THROW(LoadModel(dir.path(), lexicon_->features.get()));
}

TEST(Thresholds, SerializeRoundTrip) {
  std::array<double, kNumArgCases> t = {0.0, 0.45, 0.95};
  EXPECT_EQ(ParseThresholds(SerializeThresholds(t)), t);
}

}  // namespace
}  // namespace pasforge
