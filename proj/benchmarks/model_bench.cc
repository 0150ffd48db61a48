#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pasforge/model.h"
#include "pasforge/synthetic.h"
#include "pasforge/training.h"

namespace pasforge {
namespace {

struct Fixture {
  Corpus corpus;
  Lexicon lexicon;
  std::vector<Instance> instances;

  Fixture() {
    SyntheticConfig sc;
    sc.num_sentences = 60;
    corpus = GenerateSynthetic(sc).corpus;
    lexicon = BuildLexicon(corpus, {}, 2, 3);
    instances = MakeInstances(corpus, lexicon);
  }

  std::vector<const ModelInput*> Batch(int n) const {
    std::vector<const ModelInput*> b;
    for (int i = 0; i < n; ++i) b.push_back(&instances[i % instances.size()].input);
    return b;
  }
};

const Fixture& Data() {
  static const Fixture f;
  return f;
}

ModelConfig Config(std::string_view name, int hidden) {
  ModelConfig c;
  ApplyModelName(name, c);
  c.hidden_dim = hidden;
  c.gru_hidden = 64;
  c.word_dim = 32;
  c.path_item_dim = 32;
  return c;
}

void BM_Predict(benchmark::State& state, std::string_view name) {
  const Fixture& d = Data();
  PasModel m(Config(name, static_cast<int>(state.range(0))), d.lexicon);
  std::vector<const ModelInput*> batch = d.Batch(128);
  for (auto _ : state) benchmark::DoNotOptimize(m.Predict(batch));
  state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK_CAPTURE(BM_Predict, B, "B")->Arg(256)->Arg(2000);
BENCHMARK_CAPTURE(BM_Predict, WBP_Roth, "WBP-Roth")->Arg(256);
BENCHMARK_CAPTURE(BM_Predict, WBP_Shwartz, "WBP-Shwartz")->Arg(256)->Arg(2000);

void BM_TrainStep(benchmark::State& state) {
  const Fixture& d = Data();
  PasModel m(Config("WBP-Shwartz", static_cast<int>(state.range(0))), d.lexicon);
  std::vector<const ModelInput*> batch = d.Batch(128);
  std::vector<int> labels;
  for (int i = 0; i < 128; ++i) labels.push_back(d.instances[i % d.instances.size()].label());
  std::mt19937_64 rng(1);
  std::vector<nn::Parameter<float>*> params = m.Parameters();
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.TrainStep(batch, labels, rng));
    nn::AdamStep<float>(params, nn::AdamConfig{});
  }
  state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK(BM_TrainStep)->Arg(256)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GruEncode(benchmark::State& state) {
  const Fixture& d = Data();
  const bool roth = state.range(1) != 0;
  PasModel m(Config(roth ? "WBP-Roth" : "WBP-Shwartz", 64), d.lexicon);
  ModelInput in = d.instances[0].input;
  const int n = static_cast<int>(state.range(0));
  in.path_pos.assign(n, in.path_pos.front());
  in.path_lemma.assign(n, in.path_lemma.front());
  in.path_dir.assign(n, in.path_dir.front());
  for (auto _ : state) {
    benchmark::DoNotOptimize(roth ? m.EncodePathRoth(in) : m.EncodePathShwartz(in));
  }
}
BENCHMARK(BM_GruEncode)->ArgsProduct({{1, 5, 15}, {0, 1}})->ArgNames({"items", "roth"});

}  // namespace
}  // namespace pasforge
