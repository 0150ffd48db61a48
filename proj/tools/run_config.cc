#include "run_config.h"

#include <algorithm>

#include "pasforge/errors.h"
#include "pasforge/util.h"

namespace pasforge::cli {

void RunConfig::Set(std::string_view key, std::string_view value) {
  try {
    if (std::find(kPathKeys.begin(), kPathKeys.end(), key) != kPathKeys.end()) {
      paths[std::string(key)] = std::string(value);
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(std::stoull(std::string(value)));
    } else if (key == "threads") {
      threads = ParseInt(value);
    } else if (key == "runs") {
      runs = ParseInt(value);
    } else if (key == "ensemble") {
      ensemble = ParseInt(value);
    } else if (key == "calibrate_on") {
      if (value != "train" && value != "dev") {
        throw ConfigError("calibrate_on must be 'train' or 'dev'");
      }
      calibrate_on_dev = value == "dev";
    } else if (key == "lemma_min_count") {
      lemma_min_count = ParseInt(value);
    } else if (key == "feature_min_count") {
      feature_min_count = ParseInt(value);
    } else if (key.substr(0, 10) == "synthetic.") {
      if (!synthetic.Set(key.substr(10), value)) {
        throw UsageError("unknown setting '" + std::string(key) + "'");
      }
    } else if (!model.Set(key, value) && !training.Set(key, value)) {
      throw UsageError("unknown setting '" + std::string(key) + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value for '" + std::string(key) + "': " + e.what());
  }
}

void RunConfig::LoadFile(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw UsageError("--config: file " + path.string() + " does not exist");
  }
  int line_no = 0;
  for (const std::string& raw : Split(ReadFile(path), '\n')) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::Finalize() {
  if (seed) {
    model.seed = *seed;
    training.seed = *seed;
    synthetic.seed = *seed;
  }
  if (threads < 1) throw UsageError("--threads must be at least 1");
  if (runs < 1) throw UsageError("runs must be at least 1");
  if (ensemble < 0) throw UsageError("--ensemble must be non-negative");
  model.Validate();
  training.Validate();
}

std::optional<std::filesystem::path> RunConfig::Path(const std::string& key) const {
  auto it = paths.find(key);
  if (it == paths.end() || it->second.empty()) return std::nullopt;
  return std::filesystem::path(it->second);
}

std::filesystem::path RunConfig::RequireInput(const std::string& key,
                                              const std::string& flag) const {
  std::optional<std::filesystem::path> p = Path(key);
  if (!p) throw UsageError(flag + " is required (or set " + key + "= in the config file)");
  if (!std::filesystem::exists(*p)) {
    throw UsageError(flag + ": " + p->string() + " does not exist");
  }
  return *p;
}

std::filesystem::path RunConfig::OutputOr(const std::string& key,
                                          const std::string& fallback) const {
  return Path(key).value_or(fallback);
}

}  // namespace pasforge::cli
