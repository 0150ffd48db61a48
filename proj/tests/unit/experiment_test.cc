#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "pasforge/errors.h"
#include "pasforge/experiment.h"
#include "pasforge/synthetic.h"

namespace pasforge {
namespace {

TEST(AblationSpecs, ParseAndLabels) {
  ModelConfig base;
  base.hidden_dim = 32;
  std::vector<AblationSpec> specs = ParseAblationSpecs(
      "B all\n\nB -cases\nWBP-Shwartz -{word,path} ens\nWB -word,path\nBP-Roth\n", base);
  ASSERT_EQ(specs.size(), 5u);
  EXPECT_EQ(specs[0].ModelLabel(), "B");
  EXPECT_EQ(specs[0].BinaryLabel(), "all");
  EXPECT_EQ(specs[1].BinaryLabel(), "-cases");
  EXPECT_EQ(specs[1].config.binary_template_ablations,
            (std::set<TemplateGroup>{TemplateGroup::kCases}));
  EXPECT_EQ(specs[2].ModelLabel(), "WBP-Shwartz (ens)");
  EXPECT_TRUE(specs[2].ensemble);
  EXPECT_EQ(specs[2].BinaryLabel(), "-{word,path}");
  EXPECT_EQ(specs[3].BinaryLabel(), "-{word,path}");
  EXPECT_EQ(specs[4].ModelLabel(), "BP-Roth");
  for (const AblationSpec& s : specs) EXPECT_EQ(s.config.hidden_dim, 32);
  EXPECT_ANY_THROW(ParseAblationSpecs("B -nouns\n", base));
  EXPECT_ANY_THROW(ParseAblationSpecs("Q all\n", base));
}

TEST(AblationTable, RowsFollowSpecOrder) {
  SyntheticConfig cfg;
  cfg.num_sentences = 20;
  Corpus train = GenerateSynthetic(cfg).corpus;
  cfg.seed = 2;
  cfg.num_sentences = 8;
  Corpus dev = GenerateSynthetic(cfg).corpus;
  ModelConfig base;
  base.hidden_dim = 12;
  base.gru_hidden = 4;
  base.word_dim = 4;
  base.path_item_dim = 3;
  ExperimentOptions opts;
  opts.training.batch_size = 32;
  opts.training.max_epochs = 2;
  opts.training.patience = 1;
  opts.feature_min_count = 2;
  opts.runs = 2;
  std::vector<AblationSpec> specs =
      ParseAblationSpecs("WB -cases\nB all\nBP-Roth all ens\n", base);
  Splits splits{&train, &dev, &dev};
  std::vector<TableRow> rows = AblationTable(specs, splits, opts);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].model, "WB");
  EXPECT_EQ(rows[0].binary, "-cases");
  EXPECT_EQ(rows[1].model, "B");
  EXPECT_EQ(rows[2].model, "BP-Roth (ens)");
  EXPECT_EQ(rows[1].report.num_runs, 2);
  for (const TableRow& r : rows) {
    EXPECT_GT(r.report.at(kAllRow, Stratum::kOverall).gold, 0);
    EXPECT_EQ(ReportRow(r.report, kAllRow).size(), ReportColumns().size());
  }
}

TEST(Synthetic, SameSeedSameCorpus) {
  SyntheticConfig cfg;
  cfg.num_sentences = 30;
  EXPECT_EQ(SerializeCorpus(GenerateSynthetic(cfg).corpus),
            SerializeCorpus(GenerateSynthetic(cfg).corpus));
  SyntheticConfig other = cfg;
  other.seed = 2;
  EXPECT_NE(SerializeCorpus(GenerateSynthetic(cfg).corpus),
            SerializeCorpus(GenerateSynthetic(other).corpus));
}

TEST(Synthetic, RealizedZeroFractionNearTarget) {
  for (double target : {0.3, 0.15}) {
    SyntheticConfig cfg;
    cfg.zero_fraction = target;
    cfg.num_sentences = 1;
    // Grow until at least 1000 predicates.
    SyntheticCorpus syn;
    for (cfg.num_sentences = 100;; cfg.num_sentences += 50) {
      syn = GenerateSynthetic(cfg);
      if (syn.stats.predicates >= 1000) break;
    }
    long zero = 0;
    long gold = 0;
    for (const Sentence& s : syn.corpus) {
      for (const PredicateInstance& p : s.predicates()) {
        for (const auto& g : p.gold) {
          if (!g) continue;
          ++gold;
          zero += DependencyDistance(s, p.pred_token, *g) >= 2;
        }
      }
    }
    EXPECT_EQ(gold, syn.stats.gold_args);
    EXPECT_EQ(zero, syn.stats.zero_args);
    EXPECT_NEAR(static_cast<double>(zero) / gold, target, 0.05) << "target " << target;
  }
}

TEST(Synthetic, ParsesAndValidates) {
  SyntheticConfig cfg;
  cfg.num_sentences = 50;
  cfg.seed = 8;
  SyntheticCorpus syn = GenerateSynthetic(cfg);
  std::istringstream in(SerializeCorpus(syn.corpus));
  Corpus parsed = ParseCorpus(in);
  EXPECT_EQ(parsed, syn.corpus);
  cfg.zero_fraction = 1.5;
  EXPECT_ANY_THROW(GenerateSynthetic(cfg));
}

}  // namespace
}  // namespace pasforge
