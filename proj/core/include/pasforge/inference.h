#ifndef PASFORGE_INFERENCE_H_
#define PASFORGE_INFERENCE_H_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pasforge/corpus.h"
#include "pasforge/model.h"
#include "pasforge/training.h"

namespace pasforge {

using LabelProbs = std::array<double, kNumLabels>;

// Probabilities of every candidate of one predicate, candidates in
// increasing token order.
struct PredicateScores {
  const Sentence* sentence = nullptr;
  int sentence_index = 0;
  int predicate_index = 0;
  std::vector<int> candidates;
  std::vector<LabelProbs> probs;

  const PredicateInstance& predicate() const { return sentence->predicates()[predicate_index]; }
};

struct CaseChoice {
  int token = 0;
  double prob = 0.0;

  bool operator==(const CaseChoice&) const = default;
};

struct Prediction {
  int sentence_id = 0;
  int pred_token = 0;
  std::array<std::optional<CaseChoice>, kNumArgCases> args;

  bool operator==(const Prediction&) const = default;
};

// For each case the most probable candidate (smaller token on ties), kept
// only when its probability exceeds that case's threshold.
Prediction DecodePredicate(const PredicateScores& scores,
                           const std::array<double, kNumArgCases>& thresholds);

// Groups consecutive instances of the same predicate and scores them.
std::vector<PredicateScores> ScoreInstances(const PasModel& model,
                                            const std::vector<Instance>& instances,
                                            int batch_size = 512);

// Throws IncompatibleModelError unless the models agree on configuration
// shape, feature index and vocabularies.
void CheckCompatible(const PasModel& a, const PasModel& b);

// Element-wise mean of the members' probability rows.
std::vector<LabelProbs> EnsembleProbabilities(std::span<const PasModel* const> models,
                                              std::span<const ModelInput* const> batch);

// Mean of k probability rows.
LabelProbs MeanProbabilities(std::span<const LabelProbs> rows);

class Ensemble {
 public:
  explicit Ensemble(std::vector<PasModel> members);

  int size() const { return static_cast<int>(members_.size()); }
  const std::vector<PasModel>& members() const { return members_; }
  const PasModel& front() const { return members_.front(); }

  std::vector<PredicateScores> Score(const std::vector<Instance>& instances,
                                     int batch_size = 512) const;

  // Defaults to the first member's thresholds.
  std::array<double, kNumArgCases> thresholds;

 private:
  std::vector<PasModel> members_;
};

std::vector<Prediction> Decode(const std::vector<PredicateScores>& scores,
                               const std::array<double, kNumArgCases>& thresholds);

// "<sent_id> <pred_token> NOM=<tok,prob|-> ACC=<...> DAT=<...>"
std::string FormatPrediction(const Prediction& p);
Prediction ParsePrediction(std::string_view line);
std::string SerializePredictions(const std::vector<Prediction>& predictions);
std::vector<Prediction> ParsePredictions(std::string_view text);
void WritePredictionFile(const std::filesystem::path& path,
                         const std::vector<Prediction>& predictions);
std::vector<Prediction> ReadPredictionFile(const std::filesystem::path& path);

}  // namespace pasforge

#endif  // PASFORGE_INFERENCE_H_
