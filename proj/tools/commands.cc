#include "commands.h"

#include <spdlog/spdlog.h>

#include <cstdio>
#include <random>

#include "pasforge/corpus.h"
#include "pasforge/diagnostics.h"
#include "pasforge/errors.h"
#include "pasforge/evaluation.h"
#include "pasforge/experiment.h"
#include "pasforge/inference.h"
#include "pasforge/model.h"
#include "pasforge/util.h"
#include "pasforge/vocab.h"

namespace pasforge::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.txt";
constexpr const char* kBuildSettings = "build.txt";
constexpr const char* kLemmas = "lemmas.txt";
constexpr const char* kDirections = "directions.txt";
constexpr const char* kFeatures = "features.txt";
constexpr const char* kWordTable = "word_emb.vec";
constexpr const char* kPathTable = "path_emb.vec";
constexpr const char* kDirTable = "dir_emb.vec";
constexpr const char* kHistory = "history.csv";
constexpr const char* kEnsembleThresholds = "ensemble-thresholds.txt";

ExperimentOptions Options(const RunConfig& c) {
  ExperimentOptions o;
  o.training = c.training;
  o.runs = c.runs;
  o.calibrate_on_dev = c.calibrate_on_dev;
  o.threads = c.threads;
  o.lemma_min_count = c.lemma_min_count;
  o.feature_min_count = c.feature_min_count;
  if (auto p = c.Path("word_vectors")) {
    o.word_vectors = c.RequireInput("word_vectors", "--word-vectors");
  }
  return o;
}

// Reads the manifest and checks every recorded hash against the files.
void VerifyManifest(const fs::path& dir) {
  const fs::path manifest = dir / kManifest;
  if (!fs::exists(manifest)) throw UsageError("--artifacts: " + dir.string() + " has no manifest");
  for (const std::string& line : Split(ReadFile(manifest), '\n')) {
    std::vector<std::string_view> f = SplitFields(line);
    if (f.empty()) continue;
    if (f.size() != 2) throw ConfigError("bad manifest line '" + line + "'");
    const fs::path file = dir / std::string(f[1]);
    if (!fs::exists(file) || HashFileHex(file) != f[0]) {
      throw IncompatibleModelError("artifact " + file.string() +
                                   " does not match its manifest hash");
    }
  }
}

struct Artifacts {
  Lexicon lexicon;
  fs::path dir;
};

Artifacts LoadArtifacts(const fs::path& dir, const ModelConfig& model) {
  VerifyManifest(dir);
  Artifacts a;
  a.dir = dir;
  a.lexicon.lemmas = std::make_shared<Vocabulary>(Vocabulary::Deserialize(ReadFile(dir / kLemmas)));
  a.lexicon.directions =
      std::make_shared<Vocabulary>(Vocabulary::Deserialize(ReadFile(dir / kDirections)));
  a.lexicon.features =
      std::make_shared<FeatureIndex>(FeatureIndex::Deserialize(ReadFile(dir / kFeatures)));
  a.lexicon.templates = model.Templates();
  const std::string expected = "ablations=" + model.Templates().RemovedList();
  bool matched = false;
  for (const std::string& line : Split(ReadFile(dir / kBuildSettings), '\n')) {
    if (line.rfind("ablations=", 0) == 0) matched = line == expected;
  }
  if (!matched) {
    throw ConfigError("artifacts in " + dir.string() +
                      " were built with different feature-template ablations");
  }
  return a;
}

Lexicon LexiconFor(const RunConfig& c, const Corpus& train, std::optional<Artifacts>& artifacts) {
  if (auto dir = c.Path("artifacts")) {
    artifacts = LoadArtifacts(c.RequireInput("artifacts", "--artifacts"), c.model);
    return artifacts->lexicon;
  }
  return BuildLexicon(train, c.model.Templates(), c.lemma_min_count, c.feature_min_count);
}

// Copies the initial embedding tables written by `build` into `model`.
void ApplyArtifactTables(const Artifacts& a, PasModel& model) {
  std::mt19937_64 rng(model.config().seed);
  const ModelConfig& mc = model.config();
  if (mc.use_word_emb) {
    EmbeddingTable t = LoadPretrained(a.dir / kWordTable, a.lexicon.lemmas, mc.word_dim, rng).table;
    t.trainable = !mc.freeze_embeddings;
    model.SetWordEmbeddings(t);
  }
  if (mc.path_variant != PathVariant::kNone) {
    EmbeddingTable p =
        LoadPretrained(a.dir / kPathTable, a.lexicon.lemmas, mc.path_item_dim, rng).table;
    EmbeddingTable d =
        LoadPretrained(a.dir / kDirTable, a.lexicon.directions, mc.path_item_dim, rng).table;
    p.trainable = d.trainable = !mc.freeze_embeddings;
    model.SetPathEmbeddings(p);
    model.SetDirectionEmbeddings(d);
  }
}

PasModel TrainOne(const RunConfig& c, const ModelConfig& mc, const TrainingConfig& tc,
                  const Lexicon& lexicon, const std::optional<Artifacts>& artifacts,
                  const std::vector<Instance>& train, const std::vector<Instance>& dev,
                  const fs::path& out_dir) {
  PasModel model(mc, lexicon);
  if (artifacts) ApplyArtifactTables(*artifacts, model);
  if (auto wv = c.Path("word_vectors"); wv && mc.use_word_emb) {
    std::mt19937_64 rng(mc.seed);
    EmbeddingTable t =
        LoadPretrained(c.RequireInput("word_vectors", "--word-vectors"), lexicon.lemmas,
                       mc.word_dim, rng)
            .table;
    t.trainable = !mc.freeze_embeddings;
    model.SetWordEmbeddings(t);
  }
  TrainingHistory history = Train(model, train, dev, tc);
  model.thresholds = CalibrateThresholds(model, c.calibrate_on_dev && !dev.empty() ? dev : train);
  SaveModel(model, out_dir);
  WriteFile(out_dir / kHistory, history.ToCsv());
  spdlog::info("saved checkpoint {} (best epoch {}, thresholds {})", out_dir.string(),
               history.best_epoch, Trim(SerializeThresholds(model.thresholds)));
  return model;
}

std::vector<fs::path> MemberDirs(const fs::path& checkpoint) {
  std::vector<fs::path> dirs;
  for (int i = 0;; ++i) {
    fs::path d = checkpoint / ("member-" + std::to_string(i));
    if (!fs::is_directory(d)) break;
    dirs.push_back(d);
  }
  return dirs;
}

void PrintReport(const std::vector<TableRow>& rows, const fs::path& prefix) {
  const std::string table = FormatTable(rows);
  std::fputs(table.c_str(), stdout);
  WriteFile(fs::path(prefix.string() + ".txt"), table);
  WriteFile(fs::path(prefix.string() + ".csv"), FormatCsv(rows));
}

}  // namespace

int CmdBuild(const RunConfig& c) {
  const Corpus train = ParseCorpusFile(c.RequireInput("train", "--train"));
  const fs::path dir = c.OutputOr("artifacts", "artifacts");
  fs::create_directories(dir);
  Lexicon lex =
      BuildLexicon(train, c.model.Templates(), c.lemma_min_count, c.feature_min_count);
  WriteFile(dir / kLemmas, lex.lemmas->Serialize());
  WriteFile(dir / kDirections, lex.directions->Serialize());
  WriteFile(dir / kFeatures, lex.features->Serialize());

  std::mt19937_64 rng(c.model.seed);
  EmbeddingTable word;
  if (auto wv = c.Path("word_vectors")) {
    PretrainedLoad loaded = LoadPretrained(c.RequireInput("word_vectors", "--word-vectors"),
                                           lex.lemmas, c.model.word_dim, rng);
    spdlog::info("copied {} of {} word vectors", loaded.copied_rows, lex.lemmas->size());
    word = std::move(loaded.table);
  } else {
    word = RandomEmbeddingTable(lex.lemmas, c.model.word_dim, rng);
  }
  SaveWordVectors(dir / kWordTable, word);
  SaveWordVectors(dir / kPathTable, RandomEmbeddingTable(lex.lemmas, c.model.path_item_dim, rng));
  SaveWordVectors(dir / kDirTable,
                  RandomEmbeddingTable(lex.directions, c.model.path_item_dim, rng));
  WriteFile(dir / kBuildSettings,
            "ablations=" + c.model.Templates().RemovedList() + "\nlemma_min_count=" +
                std::to_string(c.lemma_min_count) + "\nfeature_min_count=" +
                std::to_string(c.feature_min_count) + "\nseed=" + std::to_string(c.model.seed) +
                "\n");

  std::string manifest;
  for (const char* f : {kBuildSettings, kDirTable, kDirections, kFeatures, kLemmas, kPathTable,
                        kWordTable}) {
    manifest += HashFileHex(dir / f) + " " + f + "\n";
  }
  WriteFile(dir / kManifest, manifest);
  std::printf("lemmas %d features %d artifacts %s\n", lex.lemmas->size(), lex.features->size(),
              dir.string().c_str());
  return 0;
}

int CmdTrain(const RunConfig& c) {
  const Corpus train = ParseCorpusFile(c.RequireInput("train", "--train"));
  Corpus dev;
  if (c.Path("dev")) dev = ParseCorpusFile(c.RequireInput("dev", "--dev"));
  std::optional<Artifacts> artifacts;
  const Lexicon lexicon = LexiconFor(c, train, artifacts);
  const std::vector<Instance> train_inst = MakeInstances(train, lexicon, c.threads);
  const std::vector<Instance> dev_inst = MakeInstances(dev, lexicon, c.threads);
  spdlog::info("{} training instances, {} development instances, {} features", train_inst.size(),
               dev_inst.size(), lexicon.features->size());
  const fs::path checkpoint = c.OutputOr("checkpoint", "checkpoint");

  if (c.ensemble <= 0) {
    TrainOne(c, c.model, c.training, lexicon, artifacts, train_inst, dev_inst, checkpoint);
    return 0;
  }
  std::vector<PasModel> members;
  for (int i = 0; i < c.ensemble; ++i) {
    ModelConfig mc = c.model;
    mc.seed = c.model.seed + i;
    TrainingConfig tc = c.training;
    tc.seed = c.training.seed + i;
    spdlog::info("training ensemble member {}/{}", i + 1, c.ensemble);
    members.push_back(TrainOne(c, mc, tc, lexicon, artifacts, train_inst, dev_inst,
                               checkpoint / ("member-" + std::to_string(i))));
  }
  Ensemble ens(std::move(members));
  const std::vector<Instance>& calib =
      c.calibrate_on_dev && !dev_inst.empty() ? dev_inst : train_inst;
  ens.thresholds = CalibrateThresholds(ens.Score(calib));
  WriteFile(checkpoint / kEnsembleThresholds, SerializeThresholds(ens.thresholds));
  return 0;
}

int CmdPredict(const RunConfig& c) {
  const fs::path checkpoint = c.RequireInput("checkpoint", "--checkpoint");
  fs::path corpus_path = c.Path("corpus") ? c.RequireInput("corpus", "--corpus")
                                          : c.RequireInput("test", "--corpus");
  const Corpus corpus = ParseCorpusFile(corpus_path);
  std::optional<FeatureIndex> expected;
  if (c.Path("artifacts")) {
    const fs::path dir = c.RequireInput("artifacts", "--artifacts");
    VerifyManifest(dir);
    expected = FeatureIndex::Deserialize(ReadFile(dir / kFeatures));
  }
  const FeatureIndex* expected_ptr = expected ? &*expected : nullptr;

  std::vector<PasModel> members;
  std::optional<std::array<double, kNumArgCases>> thresholds;
  const std::vector<fs::path> member_dirs = MemberDirs(checkpoint);
  if (member_dirs.empty()) {
    if (c.ensemble > 1) {
      throw UsageError("--ensemble " + std::to_string(c.ensemble) + ": " + checkpoint.string() +
                       " holds a single model");
    }
    members.push_back(LoadModel(checkpoint, expected_ptr));
  } else {
    const int k = c.ensemble > 0 ? c.ensemble : static_cast<int>(member_dirs.size());
    if (k > static_cast<int>(member_dirs.size())) {
      throw UsageError("--ensemble " + std::to_string(k) + ": only " +
                       std::to_string(member_dirs.size()) + " members in " + checkpoint.string());
    }
    for (int i = 0; i < k; ++i) members.push_back(LoadModel(member_dirs[i], expected_ptr));
    if (k == static_cast<int>(member_dirs.size())) {
      thresholds = ParseThresholds(ReadFile(checkpoint / kEnsembleThresholds));
    } else {
      spdlog::warn("using {} of {} members with the first member's thresholds", k,
                   member_dirs.size());
    }
  }
  Ensemble ens(std::move(members));
  if (thresholds) ens.thresholds = *thresholds;
  const std::vector<Instance> instances = MakeInstances(corpus, ens.front().lexicon(), c.threads);
  const std::vector<Prediction> predictions = Decode(ens.Score(instances), ens.thresholds);
  const fs::path out = c.OutputOr("predictions", "predictions.txt");
  WritePredictionFile(out, predictions);
  std::printf("%zu predicates, %d model(s), predictions %s\n", predictions.size(), ens.size(),
              out.string().c_str());
  return 0;
}

int CmdEvaluate(const RunConfig& c) {
  fs::path gold_path = c.Path("corpus") ? c.RequireInput("corpus", "--corpus")
                                        : c.RequireInput("test", "--corpus");
  const Corpus gold = ParseCorpusFile(gold_path);
  const std::vector<Prediction> predictions =
      ReadPredictionFile(c.RequireInput("predictions", "--predictions"));
  TableRow row;
  row.model = c.Path("checkpoint") ? c.Path("checkpoint")->filename().string() : "predictions";
  row.binary = "-";
  row.report = Evaluate(gold, predictions);
  PrintReport({row}, c.OutputOr("output", "report"));
  return 0;
}

std::string DefaultAblationSpecs() {
  return "B all\n"
         "B -cases\n"
         "WB all\n"
         "WBP-Roth all\n"
         "WBP-Shwartz all\n"
         "WBP-Shwartz -word\n"
         "WBP-Shwartz -{word,path}\n"
         "WBP-Shwartz -{word,path} ens\n"
         "WBP-Roth -{word,path}\n"
         "BP-Roth -{word,path}\n"
         "WB -{word,path}\n"
         "B -{word,path}\n";
}

int CmdAblate(const RunConfig& c) {
  const Corpus train = ParseCorpusFile(c.RequireInput("train", "--train"));
  Corpus dev;
  if (c.Path("dev")) dev = ParseCorpusFile(c.RequireInput("dev", "--dev"));
  Corpus test;
  if (c.Path("test")) test = ParseCorpusFile(c.RequireInput("test", "--test"));
  const Corpus& eval = c.Path("test") ? test : (c.Path("dev") ? dev : train);
  const std::string specs = c.Path("specs") ? ReadFile(c.RequireInput("specs", "--specs"))
                                            : DefaultAblationSpecs();
  Splits splits;
  splits.train = &train;
  splits.dev = c.Path("dev") ? &dev : nullptr;
  splits.eval = &eval;
  const std::vector<TableRow> rows =
      AblationTable(ParseAblationSpecs(specs, c.model), splits, Options(c));
  PrintReport(rows, c.OutputOr("output", "ablation"));
  return 0;
}

int CmdGenSynthetic(const RunConfig& c) {
  const SyntheticCorpus syn = GenerateSynthetic(c.synthetic);
  const fs::path out = c.OutputOr("output", "synthetic.txt");
  WriteCorpusFile(out, syn.corpus);
  std::printf("sentences %zu predicates %ld gold_args %ld zero_args %ld zero_fraction %.4f -> %s\n",
              syn.corpus.size(), syn.stats.predicates, syn.stats.gold_args, syn.stats.zero_args,
              syn.stats.ZeroFraction(), out.string().c_str());
  return 0;
}

int CmdGradCheck(const RunConfig& c) {
  GradCheckOptions o;
  o.use_double = c.use_double;
  if (c.seed) o.seed = *c.seed;
  if (!o.use_double) {
    spdlog::warn("running the gradient check in 32-bit floats with a loose tolerance; "
                 "pass --64bit for the strict check");
  }
  bool all = true;
  for (const GradCheckCase& gc : RunGradCheckSuite(o)) {
    std::printf("%-24s %s\n", gc.name.c_str(), gc.report.Summary().c_str());
    all = all && gc.report.passed;
  }
  std::printf("%s\n", all ? "grad-check passed" : "grad-check FAILED");
  return all ? 0 : 1;
}

}  // namespace pasforge::cli
