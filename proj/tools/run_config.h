#ifndef PASFORGE_TOOLS_RUN_CONFIG_H_
#define PASFORGE_TOOLS_RUN_CONFIG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pasforge/model.h"
#include "pasforge/synthetic.h"
#include "pasforge/training.h"

namespace pasforge::cli {

// Bad invocation: missing required input, unknown key. Exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Settings merged from a key=value file and command-line overrides.
struct RunConfig {
  std::map<std::string, std::string> paths;
  ModelConfig model;
  TrainingConfig training;
  SyntheticConfig synthetic;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool use_double = false;
  int runs = 1;
  int ensemble = 0;
  bool calibrate_on_dev = false;
  int lemma_min_count = kDefaultLemmaMinCount;
  int feature_min_count = kDefaultFeatureMinCount;

  // Throws UsageError for unknown keys and ConfigError for bad values.
  void Set(std::string_view key, std::string_view value);
  void LoadFile(const std::filesystem::path& path);
  // Pushes the global seed into the model, training and generator settings.
  void Finalize();

  std::optional<std::filesystem::path> Path(const std::string& key) const;
  // Input that must exist; `flag` names the command-line option in errors.
  std::filesystem::path RequireInput(const std::string& key, const std::string& flag) const;
  std::filesystem::path OutputOr(const std::string& key, const std::string& fallback) const;
};

inline constexpr std::array<std::string_view, 10> kPathKeys = {
    "train",  "dev",        "test",        "corpus", "word_vectors",
    "artifacts", "checkpoint", "predictions", "output", "specs"};

}  // namespace pasforge::cli

#endif  // PASFORGE_TOOLS_RUN_CONFIG_H_
