#ifndef PASFORGE_TRAINING_H_
#define PASFORGE_TRAINING_H_

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "pasforge/corpus.h"
#include "pasforge/features.h"
#include "pasforge/model.h"
#include "pasforge/nn/adam.h"

namespace pasforge {

struct TrainingConfig {
  int batch_size = 128;
  int max_epochs = 100;
  int patience = 5;
  nn::AdamConfig adam;
  std::uint64_t seed = 1;
  bool shuffle = true;

  // Throws ConfigError unless patience < max_epochs and batch_size >= 2.
  void Validate() const;
  // Applies one key=value setting; returns false for unknown keys.
  bool Set(std::string_view key, std::string_view value);
};

// One (predicate, candidate) pair with everything the model needs
// precomputed. The corpus it was built from must outlive it.
struct Instance {
  const Sentence* sentence = nullptr;
  int sentence_index = 0;
  int predicate_index = 0;
  int candidate = 0;
  Case gold = Case::kNone;
  PathSequence path;
  BinaryFeatureVector features;
  ModelInput input;

  const PredicateInstance& predicate() const { return sentence->predicates()[predicate_index]; }
  int label() const { return CaseIndex(gold); }
};

// Ordered by (sentence, predicate, candidate token). `threads` > 1 splits the
// sentences across worker threads; the output does not depend on it.
std::vector<Instance> MakeInstances(const Corpus& corpus, const Lexicon& lexicon,
                                    int threads = 1);

// Tracks the best loss and counts epochs without strict improvement.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  // Records the loss of the next epoch; returns true when training should stop.
  bool Update(double loss);
  bool improved() const { return improved_; }
  int best_epoch() const { return best_epoch_; }  // 1-based, 0 before any update
  double best_loss() const { return best_loss_; }
  int epochs() const { return epochs_; }

 private:
  int patience_;
  int epochs_ = 0;
  int best_epoch_ = 0;
  int bad_epochs_ = 0;
  bool improved_ = false;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_dev_loss = 0.0;
  bool early_stopped = false;

  // "epoch,train_loss,dev_loss" with round-trip float text; wall-clock time
  // is left out so that reruns produce identical files.
  std::string ToCsv() const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mean cross-entropy over `instances` in inference mode.
double MeanLoss(const PasModel& model, const std::vector<Instance>& instances,
                int batch_size = 512);

// Mini-batch Adam with early stopping on dev loss. The model is left holding
// the parameters of the best epoch. Throws TrainingError on a non-finite loss.
TrainingHistory Train(PasModel& model, const std::vector<Instance>& train,
                      const std::vector<Instance>& dev, const TrainingConfig& config,
                      const EpochCallback& on_epoch = {});

inline constexpr int kThresholdGridSize = 20;  // 0.00, 0.05, ..., 0.95

std::array<double, kThresholdGridSize> ThresholdGrid();

struct PredicateScores;

// Per-case grid search of the decode threshold that maximises that case's F1;
// ties go to the smallest threshold.
std::array<double, kNumArgCases> CalibrateThresholds(const std::vector<PredicateScores>& scores);
std::array<double, kNumArgCases> CalibrateThresholds(const PasModel& model,
                                                     const std::vector<Instance>& instances);

// F1 of case `c` when every predicate in `scores` is decoded with threshold
// `theta` for that case.
double CaseF1AtThreshold(const std::vector<PredicateScores>& scores, Case c, double theta);

}  // namespace pasforge

#endif  // PASFORGE_TRAINING_H_
