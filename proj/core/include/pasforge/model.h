#ifndef PASFORGE_MODEL_H_
#define PASFORGE_MODEL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pasforge/corpus.h"
#include "pasforge/features.h"
#include "pasforge/nn/gru.h"
#include "pasforge/nn/layers.h"
#include "pasforge/nn/parameter.h"
#include "pasforge/vocab.h"

namespace pasforge {

enum class PathVariant { kNone, kRoth, kShwartz };

std::string_view PathVariantName(PathVariant v);
PathVariant PathVariantFromName(std::string_view name);

struct ModelConfig {
  bool use_word_emb = true;                       // W
  PathVariant path_variant = PathVariant::kShwartz;  // P
  bool use_binary = true;                         // B
  std::set<TemplateGroup> binary_template_ablations;
  int hidden_dim = 2000;
  int n_hidden_layers = 2;
  int gru_hidden = 192;
  int word_dim = 256;
  int path_item_dim = 64;
  double dropout = 0.2;
  bool freeze_embeddings = false;
  std::uint64_t seed = 1;

  // Throws ConfigError when no input block is enabled or a dim is invalid.
  void Validate() const;
  // Model name in the W/B/P convention, e.g. "WBP-Shwartz" or "B".
  std::string Name() const;
  TemplateSet Templates() const;

  // key=value lines.
  std::string Serialize() const;
  static ModelConfig Parse(std::string_view text);
  // Applies one key=value setting; returns false for unknown keys.
  bool Set(std::string_view key, std::string_view value);

  bool operator==(const ModelConfig&) const = default;
};

// Parses names like "B", "WB", "WBP-Roth", "BP-Shwartz" into the input-block
// flags of `config`.
void ApplyModelName(std::string_view name, ModelConfig& config);

// Symbol tables and the pruned feature space shared by every model trained on
// the same data.
struct Lexicon {
  std::shared_ptr<const Vocabulary> lemmas;      // word and path item tables
  std::shared_ptr<const Vocabulary> directions;
  std::shared_ptr<const FeatureIndex> features;
  TemplateSet templates;
};

inline constexpr int kDefaultLemmaMinCount = 5;
inline constexpr int kDefaultFeatureMinCount = 10;

Lexicon BuildLexicon(const Corpus& train, const TemplateSet& templates,
                     int lemma_min_count = kDefaultLemmaMinCount,
                     int feature_min_count = kDefaultFeatureMinCount);

// Network input for one (predicate, candidate) pair.
struct ModelInput {
  int pred_word = -1;
  int cand_word = -1;
  std::vector<int> path_pos;    // lemma-vocabulary ids of the item POS
  std::vector<int> path_lemma;  // lemma-vocabulary ids (POS fallback)
  std::vector<int> path_dir;    // direction-vocabulary ids
  std::vector<int> features;    // sorted feature ids

  bool operator==(const ModelInput&) const = default;
};

ModelInput EncodeInput(const Lexicon& lexicon, const Sentence& s, const PredicateInstance& pred,
                       int a, const PathSequence& path, const BinaryFeatureVector& features);

// Scores every case label for a batch of candidates:
//   m   = [h_path, w_p, w_a, f]           (disabled blocks omitted)
//   h_i = ReLU(BN(W_i h_{i-1} + b_i))     for i = 1..n
//   g   = softmax(W_out h_n + b_out)
template <typename T>
class BasicPasModel {
 public:
  using Matrix = nn::Matrix<T>;
  using Vector = nn::Vector<T>;

  // Random initialisation from config.seed: embeddings uniform(-0.05, 0.05),
  // GRU orthonormal, dense layers Glorot uniform.
  BasicPasModel(ModelConfig config, Lexicon lexicon);

  const ModelConfig& config() const { return config_; }
  const Lexicon& lexicon() const { return lexicon_; }

  int DenseInputWidth() const;
  int InputWidth() const;
  int GruInputDim() const;
  // Timesteps consumed by the path encoder for `input`.
  int PathTimesteps(const ModelInput& input) const;

  // Copies pretrained rows. The table must be built over the model's lemma
  // (or direction) vocabulary with the configured width.
  void SetWordEmbeddings(const EmbeddingTable& table);
  void SetPathEmbeddings(const EmbeddingTable& table);
  void SetDirectionEmbeddings(const EmbeddingTable& table);
  EmbeddingTable WordEmbeddings() const;
  EmbeddingTable PathEmbeddings() const;
  EmbeddingTable DirectionEmbeddings() const;

  // Path encoders in inference mode (no dropout).
  Vector EncodePathRoth(const ModelInput& input) const;
  Vector EncodePathShwartz(const ModelInput& input) const;

  // Inference-mode probabilities, labels x batch. Pure.
  Matrix Predict(std::span<const ModelInput* const> batch) const;

  // Train-mode forward pass (batch statistics, dropout). Records the
  // activations needed by Backward, updates batch-norm running stats and
  // returns the logits.
  Matrix ForwardTrain(std::span<const ModelInput* const> batch, std::mt19937_64& rng);
  // Back-propagates d loss / d logits from the last ForwardTrain call.
  void Backward(const Matrix& dlogits);

  // Forward + softmax cross-entropy + backward; returns the mean batch loss.
  T TrainStep(std::span<const ModelInput* const> batch, std::span<const int> labels,
              std::mt19937_64& rng);

  std::vector<nn::Parameter<T>*> Parameters();
  // Every tensor that defines the model (parameters plus running stats),
  // in a fixed order, with names.
  std::vector<std::pair<std::string, Matrix*>> StateTensors();
  std::vector<std::pair<std::string, const Matrix*>> StateTensors() const;

  void ZeroGrad();

  // Per-case output thresholds, indexed by CaseIndex.
  std::array<double, kNumArgCases> thresholds = {0.0, 0.0, 0.0};

  nn::Parameter<T> word_emb;  // word_dim x |lemmas|
  nn::Parameter<T> path_emb;  // path_item_dim x |lemmas|
  nn::Parameter<T> dir_emb;   // path_item_dim x |directions|
  nn::Gru<T> gru;
  std::vector<nn::Dense<T>> hidden;
  std::vector<nn::BatchNorm<T>> norms;
  nn::Dense<T> output;

 private:
  struct Cache {
    std::vector<const ModelInput*> batch;
    std::vector<nn::GruTrace<T>> traces;
    std::vector<Matrix> dropout_masks;
    std::vector<const std::vector<int>*> sparse;
    std::vector<Matrix> layer_inputs;  // input of hidden[i] (and output, last)
    std::vector<nn::BatchNormCache<T>> norm_caches;
    bool valid = false;
  };

  void CheckInput(const ModelInput& input) const;
  Matrix PathInputs(const ModelInput& input) const;
  Matrix AssembleDense(std::span<const ModelInput* const> batch, Cache* cache,
                       std::mt19937_64* rng) const;
  void ScatterPathGrad(const ModelInput& input, const Matrix& dx);

  ModelConfig config_;
  Lexicon lexicon_;
  Cache cache_;
};

using PasModel = BasicPasModel<float>;

extern template class BasicPasModel<float>;
extern template class BasicPasModel<double>;

// Checkpoint directory: config.txt, tensors.pasnt, lemmas.txt,
// directions.txt, features.txt, thresholds.txt.
void SaveModel(const PasModel& model, const std::filesystem::path& dir);
// Throws IncompatibleModelError when the stored feature index does not match
// the hash recorded at save time, or when `expected_features` is given and
// differs from it.
PasModel LoadModel(const std::filesystem::path& dir,
                   const FeatureIndex* expected_features = nullptr);

std::string SerializeThresholds(const std::array<double, kNumArgCases>& thresholds);
std::array<double, kNumArgCases> ParseThresholds(std::string_view text);

}  // namespace pasforge

#endif  // PASFORGE_MODEL_H_
