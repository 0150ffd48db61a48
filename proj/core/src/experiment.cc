#include "pasforge/experiment.h"

#include <spdlog/spdlog.h>

#include <map>
#include <random>

#include "pasforge/errors.h"
#include "pasforge/util.h"
#include "pasforge/vocab.h"

namespace pasforge {

TrainedModel TrainModel(const ModelConfig& config, const Lexicon& lexicon,
                        const std::vector<Instance>& train, const std::vector<Instance>& dev,
                        const std::vector<Instance>& calibration,
                        const ExperimentOptions& options) {
  PasModel model(config, lexicon);
  if (options.word_vectors && config.use_word_emb) {
    std::mt19937_64 rng(config.seed);
    PretrainedLoad loaded =
        LoadPretrained(*options.word_vectors, lexicon.lemmas, config.word_dim, rng);
    loaded.table.trainable = !config.freeze_embeddings;
    model.SetWordEmbeddings(loaded.table);
    spdlog::info("loaded {} pretrained word vectors", loaded.copied_rows);
  }
  TrainingHistory history = Train(model, train, dev, options.training);
  model.thresholds = CalibrateThresholds(model, calibration);
  return {std::move(model), std::move(history)};
}

Ensemble TrainEnsemble(int k, const ModelConfig& config, const Lexicon& lexicon,
                       const std::vector<Instance>& train, const std::vector<Instance>& dev,
                       const std::vector<Instance>& calibration,
                       const ExperimentOptions& options) {
  if (k < 1) throw ConfigError("ensemble size must be at least 1");
  std::vector<PasModel> members;
  for (int i = 0; i < k; ++i) {
    ModelConfig c = config;
    c.seed = config.seed + i;
    ExperimentOptions o = options;
    o.training.seed = options.training.seed + i;
    spdlog::info("training ensemble member {}/{}", i + 1, k);
    members.push_back(TrainModel(c, lexicon, train, dev, calibration, o).model);
  }
  Ensemble ensemble(std::move(members));
  ensemble.thresholds = CalibrateThresholds(ensemble.Score(calibration));
  return ensemble;
}

std::string AblationSpec::ModelLabel() const {
  return config.Name() + (ensemble ? " (ens)" : "");
}

std::string AblationSpec::BinaryLabel() const {
  if (!config.use_binary) return "none";
  const std::string removed = config.Templates().RemovedList();
  if (removed.empty()) return "all";
  if (config.binary_template_ablations.size() == 1) return "-" + removed;
  return "-{" + removed + "}";
}

std::vector<AblationSpec> ParseAblationSpecs(std::string_view text, const ModelConfig& base) {
  std::vector<AblationSpec> specs;
  for (const std::string& raw : Split(text, '\n')) {
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> f = SplitFields(line);
    AblationSpec spec;
    spec.config = base;
    ApplyModelName(f[0], spec.config);
    spec.config.binary_template_ablations.clear();
    for (std::size_t i = 1; i < f.size(); ++i) {
      std::string_view field = f[i];
      if (field == "ens") {
        spec.ensemble = true;
      } else if (field == "all") {
        spec.config.binary_template_ablations.clear();
      } else {
        if (field.front() == '-') field.remove_prefix(1);
        if (field.size() >= 2 && field.front() == '{' && field.back() == '}') {
          field = field.substr(1, field.size() - 2);
        }
        spec.config.binary_template_ablations = TemplateSet::ParseRemoved(field);
      }
    }
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw ConfigError("ablation spec list is empty");
  return specs;
}

namespace {

struct PreparedData {
  Lexicon lexicon;
  std::vector<Instance> train;
  std::vector<Instance> dev;
  std::vector<Instance> eval;
};

}  // namespace

std::vector<TableRow> AblationTable(const std::vector<AblationSpec>& specs, const Splits& splits,
                                    const ExperimentOptions& options) {
  if (!splits.train || !splits.eval) throw ConfigError("ablation needs train and eval splits");
  if (options.runs < 1) throw ConfigError("runs must be at least 1");
  const Corpus& dev_corpus = splits.dev ? *splits.dev : *splits.train;
  std::map<std::set<TemplateGroup>, PreparedData> prepared;
  std::vector<TableRow> rows;
  for (const AblationSpec& spec : specs) {
    const std::set<TemplateGroup>& key = spec.config.binary_template_ablations;
    auto it = prepared.find(key);
    if (it == prepared.end()) {
      PreparedData data;
      data.lexicon = BuildLexicon(*splits.train, spec.config.Templates(), options.lemma_min_count,
                                  options.feature_min_count);
      data.train = MakeInstances(*splits.train, data.lexicon, options.threads);
      data.dev = MakeInstances(dev_corpus, data.lexicon, options.threads);
      data.eval = MakeInstances(*splits.eval, data.lexicon, options.threads);
      it = prepared.emplace(key, std::move(data)).first;
    }
    const PreparedData& data = it->second;
    const std::vector<Instance>& calibration = options.calibrate_on_dev ? data.dev : data.train;
    spdlog::info("ablation row {} / {}", spec.ModelLabel(), spec.BinaryLabel());

    TableRow row;
    row.model = spec.ModelLabel();
    row.binary = spec.BinaryLabel();
    if (spec.ensemble) {
      Ensemble ens = TrainEnsemble(options.runs, spec.config, data.lexicon, data.train, data.dev,
                                   calibration, options);
      row.report = Evaluate(*splits.eval, Decode(ens.Score(data.eval), ens.thresholds));
    } else {
      std::vector<EvalReport> reports;
      for (int r = 0; r < options.runs; ++r) {
        ModelConfig c = spec.config;
        c.seed = spec.config.seed + r;
        ExperimentOptions o = options;
        o.training.seed = options.training.seed + r;
        TrainedModel tm = TrainModel(c, data.lexicon, data.train, data.dev, calibration, o);
        reports.push_back(Evaluate(
            *splits.eval, Decode(ScoreInstances(tm.model, data.eval), tm.model.thresholds)));
      }
      row.report = AggregateRuns(reports);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pasforge
