#ifndef PASFORGE_EXPERIMENT_H_
#define PASFORGE_EXPERIMENT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pasforge/corpus.h"
#include "pasforge/evaluation.h"
#include "pasforge/inference.h"
#include "pasforge/model.h"
#include "pasforge/training.h"

namespace pasforge {

struct ExperimentOptions {
  TrainingConfig training;
  int runs = 1;
  bool calibrate_on_dev = false;
  int threads = 1;
  int lemma_min_count = kDefaultLemmaMinCount;
  int feature_min_count = kDefaultFeatureMinCount;
  std::optional<std::filesystem::path> word_vectors;
};

struct TrainedModel {
  PasModel model;
  TrainingHistory history;
};

// Builds the model, optionally loads pretrained word vectors, trains with
// early stopping on `dev` and calibrates thresholds on `calibration`.
TrainedModel TrainModel(const ModelConfig& config, const Lexicon& lexicon,
                        const std::vector<Instance>& train, const std::vector<Instance>& dev,
                        const std::vector<Instance>& calibration,
                        const ExperimentOptions& options);

// k members with seeds config.seed + i and training seed + i; the ensemble's
// thresholds are re-calibrated on the averaged probabilities.
Ensemble TrainEnsemble(int k, const ModelConfig& config, const Lexicon& lexicon,
                       const std::vector<Instance>& train, const std::vector<Instance>& dev,
                       const std::vector<Instance>& calibration,
                       const ExperimentOptions& options);

// One row of an ablation experiment.
struct AblationSpec {
  ModelConfig config;
  bool ensemble = false;  // decode the averaged probabilities of all runs

  std::string ModelLabel() const;   // e.g. "WBP-Shwartz (ens)"
  std::string BinaryLabel() const;  // "all", "-cases", "-{word,path}"
};

// One spec per non-empty line: "<name> [all | -group[,group...]] [ens]",
// with names such as B, WB, WBP-Roth. `base` supplies the dimensions.
std::vector<AblationSpec> ParseAblationSpecs(std::string_view text, const ModelConfig& base);

struct Splits {
  const Corpus* train = nullptr;
  const Corpus* dev = nullptr;   // early stopping; falls back to train
  const Corpus* eval = nullptr;  // the split reported in the table
};

// Trains, decodes and evaluates every spec in order; each row averages
// `options.runs` seeds (or ensembles them).
std::vector<TableRow> AblationTable(const std::vector<AblationSpec>& specs, const Splits& splits,
                                    const ExperimentOptions& options);

}  // namespace pasforge

#endif  // PASFORGE_EXPERIMENT_H_
