#include "pasforge/diagnostics.h"

#include <algorithm>
#include <random>
#include <set>

#include "pasforge/model.h"
#include "pasforge/nn/layers.h"
#include "pasforge/synthetic.h"

namespace pasforge {
namespace {

constexpr int kBatch = 4;
constexpr Eigen::Index kMaxEntriesPerParam = 400;

template <typename T>
nn::Matrix<T> RandomMatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  nn::Matrix<T> m(rows, cols);
  nn::UniformInit(m, 1.0, rng);
  return m;
}

template <typename T>
GradCheckCase CheckDenseStack(const GradCheckOptions& o) {
  std::mt19937_64 rng(o.seed);
  const int in = 5, hidden = 7, sparse = 6, batch = 6;
  nn::Dense<T> d0("dense0", in, hidden, sparse), d1("dense1", hidden, hidden);
  nn::Dense<T> out("output", hidden, kNumLabels);
  nn::BatchNorm<T> bn0("dense0.bn", hidden), bn1("dense1.bn", hidden);
  for (nn::Dense<T>* d : {&d0, &d1, &out}) {
    d->InitGlorot(rng);
    nn::UniformInit(d->bias.value, 0.1, rng);
  }
  for (nn::BatchNorm<T>* bn : {&bn0, &bn1}) {
    nn::UniformInit(bn->gamma.value, 0.5, rng);
    bn->gamma.value.array() += T(1);
    nn::UniformInit(bn->beta.value, 0.2, rng);
  }
  const nn::Matrix<T> x = RandomMatrix<T>(in, batch, rng);
  std::vector<std::vector<int>> ids(batch);
  std::vector<const std::vector<int>*> sparse_batch;
  std::uniform_int_distribution<int> pick(0, sparse - 1);
  std::vector<int> labels;
  for (int b = 0; b < batch; ++b) {
    std::set<int> s = {pick(rng), pick(rng)};
    ids[b].assign(s.begin(), s.end());
    sparse_batch.push_back(&ids[b]);
    labels.push_back(b % kNumLabels);
  }

  struct Acts {
    nn::Matrix<T> z0, a0, z1, a1, logits;
    nn::BatchNormCache<T> c0, c1;
  };
  auto forward = [&](Acts& a) {
    a.z0 = d0.Forward(x, sparse_batch);
    a.a0 = nn::Relu<T>(bn0.ForwardTrain(a.z0, &a.c0, false));
    a.z1 = d1.Forward(a.a0);
    a.a1 = nn::Relu<T>(bn1.ForwardTrain(a.z1, &a.c1, false));
    a.logits = out.Forward(a.a1);
  };
  std::vector<nn::Parameter<T>*> params = {&d0.weight, &d0.bias, &bn0.gamma, &bn0.beta,
                                           &d1.weight, &d1.bias, &bn1.gamma, &bn1.beta,
                                           &out.weight, &out.bias};
  auto loss = [&]() {
    Acts a;
    forward(a);
    return nn::SoftmaxCrossEntropy<T>(a.logits, labels).loss;
  };
  auto grads = [&]() {
    for (nn::Parameter<T>* p : params) p->ZeroGrad();
    Acts a;
    forward(a);
    auto l = nn::SoftmaxCrossEntropy<T>(a.logits, labels);
    nn::Matrix<T> d = out.Backward(a.a1, nn::SoftmaxCrossEntropyGrad<T>(l.probs, labels));
    d = bn1.Backward(a.c1, nn::ReluBackward<T>(a.a1, d));
    d = d1.Backward(a.a0, d);
    d = bn0.Backward(a.c0, nn::ReluBackward<T>(a.a0, d));
    d0.Backward(x, d, sparse_batch);
  };
  return {"dense_bn_relu_stack",
          nn::GradientCheck<T>(params, loss, grads, o.tolerance, o.step)};
}

template <typename T>
GradCheckCase CheckSoftmax(const GradCheckOptions& o) {
  std::mt19937_64 rng(o.seed + 1);
  nn::Parameter<T> logits("logits", kNumLabels, 5);
  nn::UniformInit(logits.value, 3.0, rng);
  const std::vector<int> labels = {0, 3, 1, 2, 3};
  std::vector<nn::Parameter<T>*> params = {&logits};
  auto loss = [&]() { return nn::SoftmaxCrossEntropy<T>(logits.value, labels).loss; };
  auto grads = [&]() {
    logits.ZeroGrad();
    auto l = nn::SoftmaxCrossEntropy<T>(logits.value, labels);
    logits.grad = nn::SoftmaxCrossEntropyGrad<T>(l.probs, labels);
  };
  return {"softmax_cross_entropy", nn::GradientCheck<T>(params, loss, grads, o.tolerance, o.step)};
}

Lexicon TinyLexicon() {
  SyntheticConfig sc;
  sc.num_sentences = 20;
  sc.noun_vocab = 8;
  sc.verb_vocab = 4;
  sc.seed = 3;
  Corpus corpus = GenerateSynthetic(sc).corpus;
  return BuildLexicon(corpus, TemplateSet{}, 1, 1);
}

std::vector<ModelInput> RandomInputs(const Lexicon& lex, int path_items, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> word(0, lex.lemmas->size() - 1);
  std::uniform_int_distribution<int> dir(2, lex.directions->size() - 1);
  std::uniform_int_distribution<int> feat(0, lex.features->size() - 1);
  std::vector<ModelInput> inputs(kBatch);
  for (ModelInput& in : inputs) {
    in.pred_word = word(rng);
    in.cand_word = word(rng);
    for (int i = 0; i < path_items; ++i) {
      in.path_pos.push_back(word(rng));
      in.path_lemma.push_back(word(rng));
      in.path_dir.push_back(dir(rng));
    }
    std::set<int> f;
    for (int i = 0; i < 4; ++i) f.insert(feat(rng));
    in.features.assign(f.begin(), f.end());
  }
  return inputs;
}

template <typename T>
GradCheckCase CheckModel(const std::string& name, const Lexicon& lex, PathVariant variant,
                         bool word, bool binary, int path_items, const GradCheckOptions& o) {
  ModelConfig c;
  c.use_word_emb = word;
  c.use_binary = binary;
  c.path_variant = variant;
  c.hidden_dim = 6;
  c.n_hidden_layers = 2;
  c.gru_hidden = 5;
  c.word_dim = 4;
  c.path_item_dim = 3;
  c.dropout = 0.2;
  c.seed = o.seed;
  BasicPasModel<T> model(c, lex);
  std::mt19937_64 rng(o.seed + 11);
  for (nn::Parameter<T>* p : model.Parameters()) {
    if (p->value.cols() == 1 && p->name.find(".bn.") == std::string::npos) {
      nn::UniformInit(p->value, 0.1, rng);
    }
  }
  const std::vector<ModelInput> inputs = RandomInputs(lex, std::max(path_items, 1), rng);
  std::vector<const ModelInput*> batch;
  for (const ModelInput& in : inputs) batch.push_back(&in);
  const std::vector<int> labels = {0, 1, 2, 3};
  // The dropout stream is reseeded on every evaluation so the masks match.
  auto loss = [&]() {
    std::mt19937_64 drop(o.seed + 99);
    return nn::SoftmaxCrossEntropy<T>(model.ForwardTrain(batch, drop), labels).loss;
  };
  auto grads = [&]() {
    std::mt19937_64 drop(o.seed + 99);
    model.ZeroGrad();
    model.TrainStep(batch, labels, drop);
  };
  std::vector<nn::Parameter<T>*> params = model.Parameters();
  return {name, nn::GradientCheck<T>(params, loss, grads, o.tolerance, o.step,
                                     kMaxEntriesPerParam)};
}

template <typename T>
std::vector<GradCheckCase> RunAll(const GradCheckOptions& o) {
  std::vector<GradCheckCase> out;
  out.push_back(CheckDenseStack<T>(o));
  out.push_back(CheckSoftmax<T>(o));
  const Lexicon lex = TinyLexicon();
  for (int len : {1, 5, 15}) {
    out.push_back(CheckModel<T>("roth_path_len" + std::to_string(len), lex, PathVariant::kRoth,
                                false, false, len, o));
    out.push_back(CheckModel<T>("shwartz_path_len" + std::to_string(len), lex,
                                PathVariant::kShwartz, false, false, len, o));
  }
  out.push_back(CheckModel<T>("wbp_roth_all_tables", lex, PathVariant::kRoth, true, true, 5, o));
  out.push_back(
      CheckModel<T>("wbp_shwartz_all_tables", lex, PathVariant::kShwartz, true, true, 5, o));
  out.push_back(CheckModel<T>("wb_no_path", lex, PathVariant::kNone, true, true, 1, o));
  return out;
}

}  // namespace

std::vector<GradCheckCase> RunGradCheckSuite(const GradCheckOptions& options) {
  GradCheckOptions o = options;
  if (o.tolerance <= 0.0) o.tolerance = o.use_double ? 1e-4 : 5e-2;
  if (o.step <= 0.0) o.step = o.use_double ? nn::kGradCheckStep : 1e-2;
  return o.use_double ? RunAll<double>(o) : RunAll<float>(o);
}

}  // namespace pasforge
