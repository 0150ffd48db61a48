#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "commands.h"
#include "pasforge/errors.h"

namespace {

using pasforge::cli::RunConfig;
using pasforge::cli::UsageError;

// A subcommand option bound to a RunConfig key; applied only when given.
struct Binding {
  std::string key;
  std::string value;
};

class Bindings {
 public:
  void Add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    bindings_.push_back(std::make_unique<Binding>(Binding{key, ""}));
    app->add_option(flag, bindings_.back()->value, help);
  }
  void Apply(RunConfig& config) const {
    for (const auto& b : bindings_) {
      if (!b->value.empty()) config.Set(b->key, b->value);
    }
  }

 private:
  std::vector<std::unique_ptr<Binding>> bindings_;
};

void ConfigureLogging() {
  spdlog::set_level(spdlog::level::info);
  const char* env = std::getenv("PASFORGE_LOG");
  if (env == nullptr) return;
  const std::string level = env;
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level != "info") {
    spdlog::warn("PASFORGE_LOG={} not one of error, info, debug; using info", level);
  }
}

int Run(int argc, char** argv) {
  CLI::App app{"Japanese predicate-argument structure analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::string seed;
  std::string threads;
  bool use_double = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_file, "key=value settings file");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads for instance construction");
  app.add_flag("--64bit", use_double, "run the gradient check in double precision");
  app.add_option("--set", overrides, "override a setting, key=value (repeatable)");

  Bindings bindings;
  std::function<int(const RunConfig&)> command;
  auto sub = [&](const char* name, const char* help, int (*fn)(const RunConfig&)) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&command, fn] { command = fn; });
    return s;
  };

  CLI::App* build = sub("build", "build vocabularies, feature index and embedding tables",
                        pasforge::cli::CmdBuild);
  bindings.Add(build, "--train", "train", "training corpus");
  bindings.Add(build, "--word-vectors", "word_vectors", "pretrained word vectors (text format)");
  bindings.Add(build, "--artifacts", "artifacts", "output directory");

  CLI::App* train = sub("train", "train a model (or an ensemble)", pasforge::cli::CmdTrain);
  bindings.Add(train, "--train", "train", "training corpus");
  bindings.Add(train, "--dev", "dev", "development corpus for early stopping");
  bindings.Add(train, "--artifacts", "artifacts", "directory written by build");
  bindings.Add(train, "--word-vectors", "word_vectors", "pretrained word vectors");
  bindings.Add(train, "--checkpoint", "checkpoint", "output checkpoint directory");
  bindings.Add(train, "--model", "name", "model name, e.g. WBP-Shwartz");
  bindings.Add(train, "--ensemble", "ensemble", "number of seeds to train");
  bindings.Add(train, "--calibrate-on", "calibrate_on", "train or dev");

  CLI::App* predict = sub("predict", "decode a corpus", pasforge::cli::CmdPredict);
  bindings.Add(predict, "--checkpoint", "checkpoint", "checkpoint directory");
  bindings.Add(predict, "--corpus", "corpus", "corpus to decode");
  bindings.Add(predict, "--artifacts", "artifacts", "check the feature index against build");
  bindings.Add(predict, "--output", "predictions", "prediction file");
  bindings.Add(predict, "--ensemble", "ensemble", "number of members to average");

  CLI::App* evaluate = sub("evaluate", "score predictions against gold",
                           pasforge::cli::CmdEvaluate);
  bindings.Add(evaluate, "--corpus", "corpus", "gold corpus");
  bindings.Add(evaluate, "--predictions", "predictions", "prediction file");
  bindings.Add(evaluate, "--output", "output", "report prefix (.txt and .csv)");

  CLI::App* ablate = sub("ablate", "run the feature ablation matrix", pasforge::cli::CmdAblate);
  bindings.Add(ablate, "--train", "train", "training corpus");
  bindings.Add(ablate, "--dev", "dev", "development corpus");
  bindings.Add(ablate, "--test", "test", "evaluation corpus (default: dev)");
  bindings.Add(ablate, "--specs", "specs", "ablation rows, one per line");
  bindings.Add(ablate, "--runs", "runs", "runs per row");
  bindings.Add(ablate, "--output", "output", "report prefix (.txt and .csv)");

  CLI::App* gen = sub("gen-synthetic", "write a seeded synthetic corpus",
                      pasforge::cli::CmdGenSynthetic);
  bindings.Add(gen, "--output", "output", "corpus file");
  bindings.Add(gen, "--sentences", "synthetic.num_sentences", "number of sentences");
  bindings.Add(gen, "--nouns", "synthetic.noun_vocab", "noun vocabulary size");
  bindings.Add(gen, "--verbs", "synthetic.verb_vocab", "verb vocabulary size");
  bindings.Add(gen, "--max-clauses", "synthetic.max_clauses", "clauses per sentence");
  bindings.Add(gen, "--zero-fraction", "synthetic.zero_fraction", "target Zero argument share");

  sub("grad-check", "finite-difference gradient check", pasforge::cli::CmdGradCheck);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  RunConfig config;
  if (!config_file.empty()) config.LoadFile(config_file);
  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    config.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  bindings.Apply(config);
  if (!seed.empty()) config.Set("seed", seed);
  if (!threads.empty()) config.Set("threads", threads);
  config.use_double = use_double;
  config.Finalize();
  return command(config);
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  try {
    return Run(argc, argv);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
