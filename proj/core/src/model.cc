#include "pasforge/model.h"

#include <spdlog/spdlog.h>

#include <map>
#include <stdexcept>

#include "pasforge/errors.h"
#include "pasforge/nn/init.h"
#include "pasforge/tensor_io.h"
#include "pasforge/util.h"

namespace pasforge {

std::string_view PathVariantName(PathVariant v) {
  switch (v) {
    case PathVariant::kNone: return "none";
    case PathVariant::kRoth: return "roth";
    case PathVariant::kShwartz: return "shwartz";
  }
  return "?";
}

PathVariant PathVariantFromName(std::string_view name) {
  if (name == "none") return PathVariant::kNone;
  if (name == "roth" || name == "Roth") return PathVariant::kRoth;
  if (name == "shwartz" || name == "Shwartz") return PathVariant::kShwartz;
  throw ConfigError("unknown path variant '" + std::string(name) + "'");
}

void ModelConfig::Validate() const {
  if (!use_word_emb && path_variant == PathVariant::kNone && !use_binary) {
    throw ConfigError("model needs at least one of word embeddings, path embedding, binary features");
  }
  if (hidden_dim < 1 || n_hidden_layers < 1 || gru_hidden < 1 || word_dim < 1 ||
      path_item_dim < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
}

std::string ModelConfig::Name() const {
  std::string name;
  if (use_word_emb) name += 'W';
  if (use_binary) name += 'B';
  if (path_variant != PathVariant::kNone) {
    name += 'P';
    name += path_variant == PathVariant::kRoth ? "-Roth" : "-Shwartz";
  }
  return name;
}

TemplateSet ModelConfig::Templates() const {
  TemplateSet t;
  t.removed = binary_template_ablations;
  return t;
}

std::string ModelConfig::Serialize() const {
  TemplateSet t = Templates();
  std::string out;
  out += "word=" + std::string(use_word_emb ? "true" : "false") + "\n";
  out += "path=" + std::string(PathVariantName(path_variant)) + "\n";
  out += "binary=" + std::string(use_binary ? "true" : "false") + "\n";
  out += "ablations=" + t.RemovedList() + "\n";
  out += "hidden_dim=" + std::to_string(hidden_dim) + "\n";
  out += "hidden_layers=" + std::to_string(n_hidden_layers) + "\n";
  out += "gru_hidden=" + std::to_string(gru_hidden) + "\n";
  out += "word_dim=" + std::to_string(word_dim) + "\n";
  out += "path_item_dim=" + std::to_string(path_item_dim) + "\n";
  out += "dropout=" + FormatDouble(dropout) + "\n";
  out += "freeze_embeddings=" + std::string(freeze_embeddings ? "true" : "false") + "\n";
  out += "seed=" + std::to_string(seed) + "\n";
  return out;
}

bool ModelConfig::Set(std::string_view key, std::string_view value) {
  try {
    if (key == "word") {
      use_word_emb = ParseBool(value);
    } else if (key == "path") {
      path_variant = PathVariantFromName(value);
    } else if (key == "binary") {
      use_binary = ParseBool(value);
    } else if (key == "ablations") {
      binary_template_ablations = TemplateSet::ParseRemoved(value);
    } else if (key == "hidden_dim") {
      hidden_dim = ParseInt(value);
    } else if (key == "hidden_layers") {
      n_hidden_layers = ParseInt(value);
    } else if (key == "gru_hidden") {
      gru_hidden = ParseInt(value);
    } else if (key == "word_dim") {
      word_dim = ParseInt(value);
    } else if (key == "path_item_dim") {
      path_item_dim = ParseInt(value);
    } else if (key == "dropout") {
      dropout = ParseDouble(value);
    } else if (key == "freeze_embeddings") {
      freeze_embeddings = ParseBool(value);
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(std::stoull(std::string(value)));
    } else if (key == "name") {
      ApplyModelName(value, *this);
    } else {
      return false;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value for model setting '" + std::string(key) + "': " + e.what());
  }
  return true;
}

ModelConfig ModelConfig::Parse(std::string_view text) {
  ModelConfig c;
  for (const std::string& raw : Split(text, '\n')) {
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value: '" + raw + "'");
    std::string_view key = Trim(line.substr(0, eq));
    std::string_view value = Trim(line.substr(eq + 1));
    if (!c.Set(key, value)) throw ConfigError("unknown model setting '" + std::string(key) + "'");
  }
  c.Validate();
  return c;
}

void ApplyModelName(std::string_view name, ModelConfig& config) {
  std::string_view letters = name;
  std::string_view variant;
  if (std::size_t dash = name.find('-'); dash != std::string_view::npos) {
    letters = name.substr(0, dash);
    variant = name.substr(dash + 1);
  }
  config.use_word_emb = false;
  config.use_binary = false;
  config.path_variant = PathVariant::kNone;
  bool path = false;
  for (char c : letters) {
    if (c == 'W') {
      config.use_word_emb = true;
    } else if (c == 'B') {
      config.use_binary = true;
    } else if (c == 'P') {
      path = true;
    } else {
      throw ConfigError("bad model name '" + std::string(name) + "'");
    }
  }
  if (path) {
    config.path_variant = variant.empty() ? PathVariant::kShwartz : PathVariantFromName(variant);
  } else if (!variant.empty()) {
    throw ConfigError("model name '" + std::string(name) + "' has a path variant but no P");
  }
  config.Validate();
}

Lexicon BuildLexicon(const Corpus& train, const TemplateSet& templates, int lemma_min_count,
                     int feature_min_count) {
  Lexicon lex;
  lex.lemmas = std::make_shared<Vocabulary>(BuildVocab(train, VocabKind::kLemma, lemma_min_count));
  lex.directions = std::make_shared<Vocabulary>(DirectionVocab());
  lex.features =
      std::make_shared<FeatureIndex>(BuildFeatureIndex(train, templates, feature_min_count));
  lex.templates = templates;
  return lex;
}

namespace {

// POS tags missing from the training vocabulary map to the padding row.
int LookupOrPad(const Vocabulary& vocab, std::string_view lemma, std::string_view pos) {
  if (auto id = vocab.Find(lemma)) return *id;
  if (auto id = vocab.Find(pos)) return *id;
  return vocab.Id(Vocabulary::kPad);
}

}  // namespace

ModelInput EncodeInput(const Lexicon& lexicon, const Sentence& s, const PredicateInstance& pred,
                       int a, const PathSequence& path, const BinaryFeatureVector& features) {
  const Vocabulary& lemmas = *lexicon.lemmas;
  ModelInput in;
  const Token& pt = s.token(pred.pred_token);
  const Token& at = s.token(a);
  in.pred_word = LookupOrPad(lemmas, pt.lemma, pt.pos);
  in.cand_word = LookupOrPad(lemmas, at.lemma, at.pos);
  const int gap = lemmas.Id(Vocabulary::kPathGap);
  for (const PathItem& item : path.items) {
    if (item.direction == Direction::kGap) {
      in.path_pos.push_back(gap);
      in.path_lemma.push_back(gap);
    } else {
      in.path_pos.push_back(LookupOrPad(lemmas, item.pos, item.pos));
      in.path_lemma.push_back(LookupOrPad(lemmas, item.lemma, item.pos));
    }
    in.path_dir.push_back(lexicon.directions->Id(DirectionSymbol(item.direction)));
  }
  in.features = features.indices;
  return in;
}

template <typename T>
BasicPasModel<T>::BasicPasModel(ModelConfig config, Lexicon lexicon)
    : config_(std::move(config)), lexicon_(std::move(lexicon)) {
  config_.Validate();
  if (!lexicon_.lemmas || !lexicon_.directions || !lexicon_.features) {
    throw ConfigError("model lexicon is incomplete");
  }
  if (lexicon_.templates.removed != config_.binary_template_ablations) {
    throw ConfigError("lexicon feature templates do not match the model's ablations");
  }
  std::mt19937_64 rng(config_.seed);
  const bool trainable = !config_.freeze_embeddings;
  if (config_.use_word_emb) {
    word_emb = nn::Parameter<T>("word_emb", config_.word_dim, lexicon_.lemmas->size());
    nn::UniformInit(word_emb.value, kOovInitRange, rng);
    word_emb.trainable = trainable;
  }
  if (config_.path_variant != PathVariant::kNone) {
    path_emb = nn::Parameter<T>("path_emb", config_.path_item_dim, lexicon_.lemmas->size());
    nn::UniformInit(path_emb.value, kOovInitRange, rng);
    path_emb.trainable = trainable;
    dir_emb = nn::Parameter<T>("dir_emb", config_.path_item_dim, lexicon_.directions->size());
    nn::UniformInit(dir_emb.value, kOovInitRange, rng);
    dir_emb.trainable = trainable;
    gru = nn::Gru<T>("gru", GruInputDim(), config_.gru_hidden);
    gru.InitOrthonormal(rng);
  }
  const int sparse = config_.use_binary ? lexicon_.features->size() : 0;
  for (int i = 0; i < config_.n_hidden_layers; ++i) {
    const std::string name = "hidden" + std::to_string(i);
    if (i == 0) {
      hidden.emplace_back(name, DenseInputWidth(), config_.hidden_dim, sparse);
    } else {
      hidden.emplace_back(name, config_.hidden_dim, config_.hidden_dim);
    }
    hidden.back().InitGlorot(rng);
    norms.emplace_back(name + ".bn", config_.hidden_dim);
  }
  output = nn::Dense<T>("output", config_.hidden_dim, kNumLabels);
  output.InitGlorot(rng);
}

template <typename T>
int BasicPasModel<T>::DenseInputWidth() const {
  int w = 0;
  if (config_.path_variant != PathVariant::kNone) w += config_.gru_hidden;
  if (config_.use_word_emb) w += 2 * config_.word_dim;
  return w;
}

template <typename T>
int BasicPasModel<T>::InputWidth() const {
  return DenseInputWidth() + (config_.use_binary ? lexicon_.features->size() : 0);
}

template <typename T>
int BasicPasModel<T>::GruInputDim() const {
  switch (config_.path_variant) {
    case PathVariant::kRoth: return config_.path_item_dim;
    case PathVariant::kShwartz: return 3 * config_.path_item_dim;
    case PathVariant::kNone: return 0;
  }
  return 0;
}

template <typename T>
int BasicPasModel<T>::PathTimesteps(const ModelInput& input) const {
  const int items = static_cast<int>(input.path_dir.size());
  switch (config_.path_variant) {
    case PathVariant::kRoth: return 3 * items;
    case PathVariant::kShwartz: return items;
    case PathVariant::kNone: return 0;
  }
  return 0;
}

namespace {

template <typename T>
void CopyTable(const EmbeddingTable& table, const Vocabulary& expected, int dim,
               nn::Parameter<T>& target, const char* what) {
  if (target.value.size() == 0) {
    throw ConfigError(std::string(what) + " embeddings are disabled in this model");
  }
  if (table.dim != dim || table.weights.rows() != dim) {
    throw ConfigError(std::string(what) + " embedding width " + std::to_string(table.dim) +
                      " does not match the model's " + std::to_string(dim));
  }
  if (!table.vocab || !(*table.vocab == expected)) {
    throw ConfigError(std::string(what) + " embedding table is over a different vocabulary");
  }
  target.value = table.weights.cast<T>();
  target.trainable = target.trainable && table.trainable;
}

template <typename T>
EmbeddingTable ExportTable(const nn::Parameter<T>& p, std::shared_ptr<const Vocabulary> vocab) {
  EmbeddingTable t;
  t.vocab = std::move(vocab);
  t.dim = static_cast<int>(p.value.rows());
  t.weights = p.value.template cast<float>();
  t.trainable = p.trainable;
  return t;
}

}  // namespace

template <typename T>
void BasicPasModel<T>::SetWordEmbeddings(const EmbeddingTable& table) {
  CopyTable(table, *lexicon_.lemmas, config_.word_dim, word_emb, "word");
}

template <typename T>
void BasicPasModel<T>::SetPathEmbeddings(const EmbeddingTable& table) {
  CopyTable(table, *lexicon_.lemmas, config_.path_item_dim, path_emb, "path");
}

template <typename T>
void BasicPasModel<T>::SetDirectionEmbeddings(const EmbeddingTable& table) {
  CopyTable(table, *lexicon_.directions, config_.path_item_dim, dir_emb, "direction");
}

template <typename T>
EmbeddingTable BasicPasModel<T>::WordEmbeddings() const {
  return ExportTable(word_emb, lexicon_.lemmas);
}

template <typename T>
EmbeddingTable BasicPasModel<T>::PathEmbeddings() const {
  return ExportTable(path_emb, lexicon_.lemmas);
}

template <typename T>
EmbeddingTable BasicPasModel<T>::DirectionEmbeddings() const {
  return ExportTable(dir_emb, lexicon_.directions);
}

template <typename T>
void BasicPasModel<T>::CheckInput(const ModelInput& input) const {
  const int vocab = lexicon_.lemmas->size();
  if (config_.use_word_emb) {
    if (input.pred_word < 0 || input.pred_word >= vocab || input.cand_word < 0 ||
        input.cand_word >= vocab) {
      throw ShapeError("model uses word embeddings but the instance has no valid word ids");
    }
  }
  if (config_.path_variant != PathVariant::kNone) {
    const std::size_t n = input.path_dir.size();
    if (n == 0) throw ShapeError("model uses a path embedding but the instance has no path");
    if (input.path_pos.size() != n || input.path_lemma.size() != n) {
      throw ShapeError("path id sequences have different lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (input.path_pos[i] < 0 || input.path_pos[i] >= vocab || input.path_lemma[i] < 0 ||
          input.path_lemma[i] >= vocab || input.path_dir[i] < 0 ||
          input.path_dir[i] >= lexicon_.directions->size()) {
        throw ShapeError("path item id out of range");
      }
    }
  }
}

template <typename T>
typename BasicPasModel<T>::Matrix BasicPasModel<T>::PathInputs(const ModelInput& input) const {
  const int d = config_.path_item_dim;
  const int items = static_cast<int>(input.path_dir.size());
  if (config_.path_variant == PathVariant::kRoth) {
    Matrix x(d, 3 * items);
    for (int i = 0; i < items; ++i) {
      x.col(3 * i) = path_emb.value.col(input.path_pos[i]);
      x.col(3 * i + 1) = path_emb.value.col(input.path_lemma[i]);
      x.col(3 * i + 2) = dir_emb.value.col(input.path_dir[i]);
    }
    return x;
  }
  Matrix x(3 * d, items);
  for (int i = 0; i < items; ++i) {
    x.col(i).segment(0, d) = path_emb.value.col(input.path_pos[i]);
    x.col(i).segment(d, d) = path_emb.value.col(input.path_lemma[i]);
    x.col(i).segment(2 * d, d) = dir_emb.value.col(input.path_dir[i]);
  }
  return x;
}

template <typename T>
void BasicPasModel<T>::ScatterPathGrad(const ModelInput& input, const Matrix& dx) {
  const int d = config_.path_item_dim;
  const int items = static_cast<int>(input.path_dir.size());
  const bool path_trainable = path_emb.trainable;
  const bool dir_trainable = dir_emb.trainable;
  for (int i = 0; i < items; ++i) {
    if (config_.path_variant == PathVariant::kRoth) {
      if (path_trainable) {
        path_emb.grad.col(input.path_pos[i]) += dx.col(3 * i);
        path_emb.grad.col(input.path_lemma[i]) += dx.col(3 * i + 1);
      }
      if (dir_trainable) dir_emb.grad.col(input.path_dir[i]) += dx.col(3 * i + 2);
    } else {
      if (path_trainable) {
        path_emb.grad.col(input.path_pos[i]) += dx.col(i).segment(0, d);
        path_emb.grad.col(input.path_lemma[i]) += dx.col(i).segment(d, d);
      }
      if (dir_trainable) dir_emb.grad.col(input.path_dir[i]) += dx.col(i).segment(2 * d, d);
    }
  }
}

template <typename T>
typename BasicPasModel<T>::Vector BasicPasModel<T>::EncodePathRoth(const ModelInput& input) const {
  if (config_.path_variant != PathVariant::kRoth) {
    throw ConfigError("model is not configured with the Roth path encoder");
  }
  CheckInput(input);
  return gru.Forward(PathInputs(input));
}

template <typename T>
typename BasicPasModel<T>::Vector BasicPasModel<T>::EncodePathShwartz(
    const ModelInput& input) const {
  if (config_.path_variant != PathVariant::kShwartz) {
    throw ConfigError("model is not configured with the Shwartz path encoder");
  }
  CheckInput(input);
  return gru.Forward(PathInputs(input));
}

template <typename T>
typename BasicPasModel<T>::Matrix BasicPasModel<T>::AssembleDense(
    std::span<const ModelInput* const> batch, Cache* cache, std::mt19937_64* rng) const {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  Matrix m(DenseInputWidth(), n);
  int offset = 0;
  if (config_.path_variant != PathVariant::kNone) {
    const int h = config_.gru_hidden;
    if (cache) {
      cache->traces.assign(n, {});
      cache->dropout_masks.assign(n, {});
    }
    for (Eigen::Index b = 0; b < n; ++b) {
      Matrix x = PathInputs(*batch[b]);
      if (cache && config_.dropout > 0.0) {
        Matrix mask = nn::DropoutMask<T>(x.rows(), x.cols(), config_.dropout, nn::Mode::kTrain,
                                         *rng);
        x = x.cwiseProduct(mask);
        cache->dropout_masks[b] = std::move(mask);
      }
      m.block(offset, b, h, 1) = gru.Forward(x, cache ? &cache->traces[b] : nullptr);
    }
    offset += h;
  }
  if (config_.use_word_emb) {
    const int d = config_.word_dim;
    for (Eigen::Index b = 0; b < n; ++b) {
      m.block(offset, b, d, 1) = word_emb.value.col(batch[b]->pred_word);
      m.block(offset + d, b, d, 1) = word_emb.value.col(batch[b]->cand_word);
    }
    offset += 2 * d;
  }
  return m;
}

template <typename T>
typename BasicPasModel<T>::Matrix BasicPasModel<T>::Predict(
    std::span<const ModelInput* const> batch) const {
  for (const ModelInput* in : batch) CheckInput(*in);
  Matrix m = AssembleDense(batch, nullptr, nullptr);
  std::vector<const std::vector<int>*> sparse;
  if (config_.use_binary) {
    for (const ModelInput* in : batch) sparse.push_back(&in->features);
  }
  Matrix a = m;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    Matrix z = i == 0 ? hidden[i].Forward(a, sparse) : hidden[i].Forward(a);
    a = nn::Relu<T>(norms[i].ForwardInfer(z));
  }
  return nn::Softmax<T>(output.Forward(a));
}

template <typename T>
typename BasicPasModel<T>::Matrix BasicPasModel<T>::ForwardTrain(
    std::span<const ModelInput* const> batch, std::mt19937_64& rng) {
  for (const ModelInput* in : batch) CheckInput(*in);
  cache_ = Cache{};
  cache_.batch.assign(batch.begin(), batch.end());
  if (config_.use_binary) {
    for (const ModelInput* in : batch) cache_.sparse.push_back(&in->features);
  }
  Matrix a = AssembleDense(batch, &cache_, &rng);
  cache_.norm_caches.resize(hidden.size());
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    cache_.layer_inputs.push_back(a);
    Matrix z = i == 0 ? hidden[i].Forward(a, cache_.sparse) : hidden[i].Forward(a);
    a = nn::Relu<T>(norms[i].ForwardTrain(z, &cache_.norm_caches[i]));
  }
  cache_.layer_inputs.push_back(a);
  cache_.valid = true;
  return output.Forward(a);
}

template <typename T>
void BasicPasModel<T>::Backward(const Matrix& dlogits) {
  if (!cache_.valid) throw std::logic_error("Backward called without a ForwardTrain");
  const std::size_t layers = hidden.size();
  Matrix da = output.Backward(cache_.layer_inputs[layers], dlogits);
  for (std::size_t k = layers; k-- > 0;) {
    Matrix dz = nn::ReluBackward<T>(cache_.layer_inputs[k + 1], da);
    dz = norms[k].Backward(cache_.norm_caches[k], dz);
    if (k == 0) {
      da = hidden[k].Backward(cache_.layer_inputs[k], dz, cache_.sparse);
    } else {
      da = hidden[k].Backward(cache_.layer_inputs[k], dz);
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(cache_.batch.size());
  int offset = 0;
  if (config_.path_variant != PathVariant::kNone) {
    const int h = config_.gru_hidden;
    for (Eigen::Index b = 0; b < n; ++b) {
      Vector dh = da.block(offset, b, h, 1);
      Matrix dx = gru.Backward(cache_.traces[b], dh);
      if (cache_.dropout_masks[b].size() > 0) dx = dx.cwiseProduct(cache_.dropout_masks[b]);
      ScatterPathGrad(*cache_.batch[b], dx);
    }
    offset += h;
  }
  if (config_.use_word_emb && word_emb.trainable) {
    const int d = config_.word_dim;
    for (Eigen::Index b = 0; b < n; ++b) {
      word_emb.grad.col(cache_.batch[b]->pred_word) += da.block(offset, b, d, 1);
      word_emb.grad.col(cache_.batch[b]->cand_word) += da.block(offset + d, b, d, 1);
    }
  }
  cache_.valid = false;
}

template <typename T>
T BasicPasModel<T>::TrainStep(std::span<const ModelInput* const> batch,
                              std::span<const int> labels, std::mt19937_64& rng) {
  Matrix logits = ForwardTrain(batch, rng);
  nn::SoftmaxLoss<T> loss = nn::SoftmaxCrossEntropy<T>(logits, labels);
  Backward(nn::SoftmaxCrossEntropyGrad<T>(loss.probs, labels));
  return loss.loss;
}

template <typename T>
std::vector<nn::Parameter<T>*> BasicPasModel<T>::Parameters() {
  std::vector<nn::Parameter<T>*> params;
  if (config_.use_word_emb) params.push_back(&word_emb);
  if (config_.path_variant != PathVariant::kNone) {
    params.push_back(&path_emb);
    params.push_back(&dir_emb);
    for (nn::Parameter<T>* p : gru.Parameters()) params.push_back(p);
  }
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    params.push_back(&hidden[i].weight);
    params.push_back(&hidden[i].bias);
    params.push_back(&norms[i].gamma);
    params.push_back(&norms[i].beta);
  }
  params.push_back(&output.weight);
  params.push_back(&output.bias);
  return params;
}

template <typename T>
std::vector<std::pair<std::string, typename BasicPasModel<T>::Matrix*>>
BasicPasModel<T>::StateTensors() {
  std::vector<std::pair<std::string, Matrix*>> out;
  for (nn::Parameter<T>* p : Parameters()) out.emplace_back(p->name, &p->value);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const std::string base = "hidden" + std::to_string(i) + ".bn";
    out.emplace_back(base + ".running_mean", &norms[i].running_mean);
    out.emplace_back(base + ".running_var", &norms[i].running_var);
  }
  return out;
}

template <typename T>
std::vector<std::pair<std::string, const typename BasicPasModel<T>::Matrix*>>
BasicPasModel<T>::StateTensors() const {
  auto* self = const_cast<BasicPasModel<T>*>(this);
  std::vector<std::pair<std::string, const Matrix*>> out;
  for (auto& [name, m] : self->StateTensors()) out.emplace_back(name, m);
  return out;
}

template <typename T>
void BasicPasModel<T>::ZeroGrad() {
  for (nn::Parameter<T>* p : Parameters()) p->ZeroGrad();
}

template class BasicPasModel<float>;
template class BasicPasModel<double>;

std::string SerializeThresholds(const std::array<double, kNumArgCases>& thresholds) {
  std::string out;
  for (Case c : kArgCases) {
    out += std::string(CaseName(c)) + " " + FormatDouble(thresholds[CaseIndex(c)]) + "\n";
  }
  return out;
}

std::array<double, kNumArgCases> ParseThresholds(std::string_view text) {
  std::array<double, kNumArgCases> out = {0.0, 0.0, 0.0};
  std::array<bool, kNumArgCases> seen = {false, false, false};
  for (const std::string& line : Split(text, '\n')) {
    std::vector<std::string_view> f = SplitFields(line);
    if (f.empty()) continue;
    std::optional<Case> c = CaseFromName(f[0]);
    if (f.size() != 2 || !c || *c == Case::kNone) {
      throw ConfigError("bad threshold line '" + line + "'");
    }
    out[CaseIndex(*c)] = ParseDouble(f[1]);
    seen[CaseIndex(*c)] = true;
  }
  for (Case c : kArgCases) {
    if (!seen[CaseIndex(c)]) {
      throw ConfigError("threshold for " + std::string(CaseName(c)) + " is missing");
    }
  }
  return out;
}

namespace {

constexpr const char* kConfigFile = "config.txt";
constexpr const char* kTensorFile = "tensors.pasnt";
constexpr const char* kLemmaFile = "lemmas.txt";
constexpr const char* kDirectionFile = "directions.txt";
constexpr const char* kFeatureFile = "features.txt";
constexpr const char* kThresholdFile = "thresholds.txt";

NamedTensor ToNamedTensor(const std::string& name, const nn::Matrix<float>& m) {
  NamedTensor t;
  t.name = name;
  t.dims = {m.rows(), m.cols()};
  t.values.resize(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.values[i * m.cols() + j] = m(i, j);
  }
  return t;
}

}  // namespace

void SaveModel(const PasModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Lexicon& lex = model.lexicon();
  std::string config = model.config().Serialize();
  config += "particle_pos=" +
            Join({lex.templates.particle_pos.begin(), lex.templates.particle_pos.end()}, ",") +
            "\n";
  config += "feature_index_hash=" + HashHex(lex.features->Hash()) + "\n";
  config += "lemma_vocab_hash=" + HashHex(lex.lemmas->Hash()) + "\n";
  WriteFile(dir / kConfigFile, config);
  WriteFile(dir / kLemmaFile, lex.lemmas->Serialize());
  WriteFile(dir / kDirectionFile, lex.directions->Serialize());
  WriteFile(dir / kFeatureFile, lex.features->Serialize());
  WriteFile(dir / kThresholdFile, SerializeThresholds(model.thresholds));
  std::vector<NamedTensor> tensors;
  for (const auto& [name, m] : model.StateTensors()) tensors.push_back(ToNamedTensor(name, *m));
  WriteTensorFile(dir / kTensorFile, tensors);
}

PasModel LoadModel(const std::filesystem::path& dir, const FeatureIndex* expected_features) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("checkpoint directory " + dir.string() + " does not exist");
  }
  ModelConfig config;
  std::set<std::string> particle_pos;
  std::string feature_hash;
  std::string lemma_hash;
  for (const std::string& raw : Split(ReadFile(dir / kConfigFile), '\n')) {
    std::string_view line = Trim(raw);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("bad checkpoint config line '" + raw + "'");
    std::string_view key = line.substr(0, eq);
    std::string_view value = line.substr(eq + 1);
    if (key == "particle_pos") {
      for (const std::string& p : Split(value, ',')) {
        if (!p.empty()) particle_pos.insert(p);
      }
    } else if (key == "feature_index_hash") {
      feature_hash = std::string(value);
    } else if (key == "lemma_vocab_hash") {
      lemma_hash = std::string(value);
    } else if (!config.Set(key, value)) {
      throw ConfigError("unknown checkpoint setting '" + std::string(key) + "'");
    }
  }
  config.Validate();

  Lexicon lex;
  auto features =
      std::make_shared<FeatureIndex>(FeatureIndex::Deserialize(ReadFile(dir / kFeatureFile)));
  if (HashHex(features->Hash()) != feature_hash) {
    throw IncompatibleModelError("feature index in " + dir.string() +
                                 " does not match the checkpoint's recorded hash");
  }
  if (expected_features && expected_features->Hash() != features->Hash()) {
    throw IncompatibleModelError("checkpoint " + dir.string() +
                                 " was trained with a different feature index");
  }
  auto lemmas = std::make_shared<Vocabulary>(Vocabulary::Deserialize(ReadFile(dir / kLemmaFile)));
  if (HashHex(lemmas->Hash()) != lemma_hash) {
    throw IncompatibleModelError("lemma vocabulary in " + dir.string() +
                                 " does not match the checkpoint's recorded hash");
  }
  lex.lemmas = lemmas;
  lex.directions =
      std::make_shared<Vocabulary>(Vocabulary::Deserialize(ReadFile(dir / kDirectionFile)));
  lex.features = features;
  lex.templates = config.Templates();
  if (!particle_pos.empty()) lex.templates.particle_pos = particle_pos;

  PasModel model(config, lex);
  std::map<std::string, NamedTensor> by_name;
  for (NamedTensor& t : ReadTensorFile(dir / kTensorFile)) {
    std::string name = t.name;
    by_name.emplace(std::move(name), std::move(t));
  }
  auto state = model.StateTensors();
  if (state.size() != by_name.size()) {
    throw IncompatibleModelError("checkpoint holds " + std::to_string(by_name.size()) +
                                 " tensors, the model expects " + std::to_string(state.size()));
  }
  for (auto& [name, m] : state) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw IncompatibleModelError("checkpoint lacks tensor " + name);
    const NamedTensor& t = it->second;
    if (t.dims.size() != 2 || t.dims[0] != m->rows() || t.dims[1] != m->cols()) {
      throw IncompatibleModelError("tensor " + name + " has the wrong shape");
    }
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) (*m)(i, j) = t.values[i * m->cols() + j];
    }
  }
  model.thresholds = ParseThresholds(ReadFile(dir / kThresholdFile));
  return model;
}

}  // namespace pasforge
