#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pasforge/errors.h"
#include "pasforge/inference.h"
#include "pasforge/synthetic.h"
#include "pasforge/training.h"
#include "test_corpus.h"

namespace pasforge {
namespace {

using testing::TreeSentence;

PredicateInstance Pred(int token, std::optional<int> nom = {}, std::optional<int> acc = {},
                       std::optional<int> dat = {}) {
  PredicateInstance p;
  p.pred_token = token;
  p.gold = {nom, acc, dat};
  return p;
}

TEST(MakeInstances, OneInstancePerOtherToken) {
  Corpus c = {TreeSentence({4, 4, 4, 4, -1}, {Pred(4, 0)})};
  Lexicon lex = BuildLexicon(c, {}, 1, 1);
  std::vector<Instance> inst = MakeInstances(c, lex);
  ASSERT_EQ(inst.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(inst[i].candidate, i);
    EXPECT_EQ(inst[i].gold, i == 0 ? Case::kNom : Case::kNone);
  }
}

TEST(MakeInstances, PredicatesFormDisjointGroups) {
  Corpus c = {TreeSentence({2, 2, -1, 2}, {Pred(1, 0), Pred(2, {}, 3)})};
  Lexicon lex = BuildLexicon(c, {}, 1, 1);
  std::vector<Instance> inst = MakeInstances(c, lex);
  ASSERT_EQ(inst.size(), 6u);
  std::set<std::pair<int, int>> seen;
  for (const Instance& i : inst) {
    EXPECT_NE(i.candidate, i.predicate().pred_token);
    EXPECT_TRUE(seen.insert({i.predicate_index, i.candidate}).second);
  }
  EXPECT_EQ(inst[0].predicate_index, 0);
  EXPECT_EQ(inst[3].predicate_index, 1);
}

TEST(MakeInstances, NoneCountAndThreadInvariance) {
  SyntheticConfig cfg;
  cfg.num_sentences = 40;
  SyntheticCorpus syn = GenerateSynthetic(cfg);
  Lexicon lex = BuildLexicon(syn.corpus, {}, 1, 2);
  std::vector<Instance> one = MakeInstances(syn.corpus, lex, 1);
  long total = 0;
  long fillers = 0;
  for (const Sentence& s : syn.corpus) {
    for (const PredicateInstance& p : s.predicates()) {
      total += s.num_tokens() - 1;
      std::set<int> distinct;
      for (const auto& g : p.gold) {
        if (g) distinct.insert(*g);
      }
      fillers += static_cast<long>(distinct.size());
    }
  }
  long none = 0;
  for (const Instance& i : one) none += i.gold == Case::kNone;
  EXPECT_EQ(static_cast<long>(one.size()), total);
  EXPECT_EQ(none, total - fillers);

  std::vector<Instance> three = MakeInstances(syn.corpus, lex, 3);
  ASSERT_EQ(three.size(), one.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(three[k].sentence, one[k].sentence);
    EXPECT_EQ(three[k].candidate, one[k].candidate);
    EXPECT_EQ(three[k].input, one[k].input);
  }
}

TEST(EarlyStopper, RuleTrace) {
  EarlyStopper es(5);
  const std::vector<double> losses = {1.0, 0.9, 0.95, 0.96, 0.97, 0.98, 0.99};
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const bool stop = es.Update(losses[i]);
    EXPECT_EQ(stop, i + 1 == losses.size()) << "epoch " << i + 1;
  }
  EXPECT_EQ(es.best_epoch(), 2);
  EXPECT_EQ(es.best_loss(), 0.9);
}

TEST(EarlyStopper, EqualLossIsNotImprovement) {
  EarlyStopper es(2);
  EXPECT_FALSE(es.Update(1.0));
  EXPECT_FALSE(es.Update(1.0));
  EXPECT_FALSE(es.improved());
  EXPECT_TRUE(es.Update(1.0));
  EXPECT_EQ(es.best_epoch(), 1);
}

TEST(TrainingConfig, Validate) {
  TrainingConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.patience = c.max_epochs;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.batch_size = 1;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_TRUE(c.Set("lr", "0.01"));
  EXPECT_EQ(c.adam.lr, 0.01);
  EXPECT_FALSE(c.Set("momentum", "0.5"));
}

ModelConfig Small() {
  ModelConfig m;
  m.hidden_dim = 16;
  m.gru_hidden = 6;
  m.word_dim = 6;
  m.path_item_dim = 4;
  return m;
}

TEST(Train, SeededRunsAreBitwiseIdentical) {
  SyntheticConfig cfg;
  cfg.num_sentences = 12;
  Corpus c = GenerateSynthetic(cfg).corpus;
  Lexicon lex = BuildLexicon(c, {}, 1, 2);
  std::vector<Instance> inst = MakeInstances(c, lex);
  TrainingConfig tc;
  tc.batch_size = 32;
  tc.max_epochs = 4;
  tc.patience = 2;
  PasModel a(Small(), lex), b(Small(), lex);
  TrainingHistory ha = Train(a, inst, inst, tc);
  TrainingHistory hb = Train(b, inst, inst, tc);
  EXPECT_EQ(ha.ToCsv(), hb.ToCsv());
  auto sa = a.StateTensors();
  auto sb = b.StateTensors();
  for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_EQ(*sa[i].second, *sb[i].second);
  for (const EpochRecord& r : ha.epochs) {
    EXPECT_TRUE(std::isfinite(r.train_loss));
    EXPECT_TRUE(std::isfinite(r.dev_loss));
  }
}

TEST(Train, KeepsBestDevSnapshot) {
  SyntheticConfig cfg;
  cfg.num_sentences = 12;
  Corpus c = GenerateSynthetic(cfg).corpus;
  Lexicon lex = BuildLexicon(c, {}, 1, 2);
  std::vector<Instance> inst = MakeInstances(c, lex);
  TrainingConfig tc;
  tc.batch_size = 16;
  tc.max_epochs = 6;
  tc.patience = 2;
  tc.adam.lr = 0.05;  // large steps make the dev loss move around
  PasModel m(Small(), lex);
  TrainingHistory h = Train(m, inst, inst, tc);
  ASSERT_GE(h.best_epoch, 1);
  double best = h.epochs[0].dev_loss;
  for (int e = 0; e < h.best_epoch; ++e) best = std::min(best, h.epochs[e].dev_loss);
  EXPECT_EQ(h.best_dev_loss, best);
  for (const EpochRecord& r : h.epochs) EXPECT_GE(r.dev_loss, h.best_dev_loss);
  EXPECT_NEAR(MeanLoss(m, inst), h.best_dev_loss, 1e-9);
}

// Predicates 0, 2 and 4 of a 6-token sentence, each with one candidate
// scored: NOM probabilities at float precision like real model output.
struct CalibrationFixture {
  Sentence sentence = TreeSentence({1, -1, 3, 1, 5, 1},
                                   {Pred(0, 1), Pred(2, 3), Pred(4)});
  std::vector<PredicateScores> scores;

  void Add(int pred, int cand, float nom) {
    PredicateScores s;
    s.sentence = &sentence;
    s.predicate_index = pred;
    s.candidates = {cand};
    const double p = static_cast<double>(nom);
    s.probs = {{p, 0.0, 0.0, 1.0 - p}};
    scores.push_back(std::move(s));
  }
};

TEST(Calibrate, SeparableScoresPickZero) {
  CalibrationFixture f;
  f.Add(0, 1, 1.0f);
  f.Add(1, 3, 1.0f);
  f.Add(2, 5, 0.0f);
  std::array<double, kNumArgCases> t = CalibrateThresholds(f.scores);
  EXPECT_EQ(t, (std::array<double, kNumArgCases>{0.0, 0.0, 0.0}));
}

TEST(Calibrate, HandTableFalsePositiveAtPointFour) {
  CalibrationFixture f;
  f.Add(0, 1, 0.6f);
  f.Add(1, 3, 0.8f);
  f.Add(2, 5, 0.4f);  // false positive
  // Every grid point in (0.4, 0.6] is optimal.
  const double best = CaseF1AtThreshold(f.scores, Case::kNom, 0.5);
  EXPECT_EQ(best, 1.0);
  for (double theta : ThresholdGrid()) {
    const bool inside = theta > 0.41 && theta < 0.61;
    EXPECT_EQ(CaseF1AtThreshold(f.scores, Case::kNom, theta) == best, inside) << theta;
  }
  EXPECT_EQ(CalibrateThresholds(f.scores)[CaseIndex(Case::kNom)], 0.45);
}

TEST(Calibrate, GridAndExhaustiveOptimality) {
  std::array<double, kThresholdGridSize> grid = ThresholdGrid();
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid[10], 0.5);
  EXPECT_EQ(grid.back(), 0.95);

  SyntheticConfig cfg;
  cfg.num_sentences = 15;
  Corpus c = GenerateSynthetic(cfg).corpus;
  Lexicon lex = BuildLexicon(c, {}, 1, 2);
  std::vector<Instance> inst = MakeInstances(c, lex);
  TrainingConfig tc;
  tc.batch_size = 32;
  tc.max_epochs = 3;
  tc.patience = 1;
  PasModel m(Small(), lex);
  Train(m, inst, inst, tc);
  std::vector<PredicateScores> scores = ScoreInstances(m, inst);
  std::array<double, kNumArgCases> t = CalibrateThresholds(scores);
  EXPECT_EQ(t, CalibrateThresholds(m, inst));
  for (Case k : kArgCases) {
    const double chosen = CaseF1AtThreshold(scores, k, t[CaseIndex(k)]);
    EXPECT_NE(std::find(grid.begin(), grid.end(), t[CaseIndex(k)]), grid.end());
    for (double theta : grid) {
      const double f1 = CaseF1AtThreshold(scores, k, theta);
      EXPECT_LE(f1, chosen);
      if (theta < t[CaseIndex(k)]) EXPECT_LT(f1, chosen);
    }
    EXPECT_GE(chosen, CaseF1AtThreshold(scores, k, 0.5));
  }
}

}  // namespace
}  // namespace pasforge
