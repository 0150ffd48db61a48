#include "pasforge/training.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "pasforge/errors.h"
#include "pasforge/inference.h"
#include "pasforge/util.h"

namespace pasforge {

void TrainingConfig::Validate() const {
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
  if (patience < 1 || patience >= max_epochs) {
    throw ConfigError("patience must be positive and smaller than max_epochs");
  }
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
}

bool TrainingConfig::Set(std::string_view key, std::string_view value) {
  try {
    if (key == "batch_size") {
      batch_size = ParseInt(value);
    } else if (key == "max_epochs") {
      max_epochs = ParseInt(value);
    } else if (key == "patience") {
      patience = ParseInt(value);
    } else if (key == "lr") {
      adam.lr = ParseDouble(value);
    } else if (key == "beta1") {
      adam.beta1 = ParseDouble(value);
    } else if (key == "beta2") {
      adam.beta2 = ParseDouble(value);
    } else if (key == "epsilon") {
      adam.epsilon = ParseDouble(value);
    } else if (key == "shuffle") {
      shuffle = ParseBool(value);
    } else {
      return false;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value for training setting '" + std::string(key) + "': " + e.what());
  }
  return true;
}

namespace {

void AppendSentenceInstances(const Corpus& corpus, int si, const Lexicon& lexicon,
                             std::vector<Instance>& out) {
  const Sentence& s = corpus[si];
  for (int pi = 0; pi < static_cast<int>(s.predicates().size()); ++pi) {
    const PredicateInstance& pred = s.predicates()[pi];
    for (int a = 0; a < s.num_tokens(); ++a) {
      if (a == pred.pred_token) continue;
      Instance inst;
      inst.sentence = &s;
      inst.sentence_index = si;
      inst.predicate_index = pi;
      inst.candidate = a;
      inst.gold = GoldLabelOf(pred, a);
      inst.path = ExtractPathSequence(s, pred, a);
      inst.features = Vectorize(ExtractBinaryFeatures(s, pred, a, lexicon.templates),
                                *lexicon.features);
      inst.input = EncodeInput(lexicon, s, pred, a, inst.path, inst.features);
      out.push_back(std::move(inst));
    }
  }
}

}  // namespace

std::vector<Instance> MakeInstances(const Corpus& corpus, const Lexicon& lexicon, int threads) {
  const int n = static_cast<int>(corpus.size());
  threads = std::clamp(threads, 1, std::max(1, n));
  std::vector<std::vector<Instance>> parts(threads);
  auto work = [&](int t) {
    for (int si = t; si < n; si += threads) AppendSentenceInstances(corpus, si, lexicon, parts[t]);
  };
  if (threads == 1) {
    work(0);
    return std::move(parts[0]);
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
  for (std::thread& th : pool) th.join();
  // Interleave back into sentence order.
  std::vector<Instance> out;
  std::vector<std::size_t> cursor(threads, 0);
  for (int si = 0; si < n; ++si) {
    const int t = si % threads;
    std::vector<Instance>& part = parts[t];
    while (cursor[t] < part.size() && part[cursor[t]].sentence_index == si) {
      out.push_back(std::move(part[cursor[t]++]));
    }
  }
  return out;
}

bool EarlyStopper::Update(double loss) {
  ++epochs_;
  improved_ = loss < best_loss_;
  if (improved_) {
    best_loss_ = loss;
    best_epoch_ = epochs_;
    bad_epochs_ = 0;
  } else {
    ++bad_epochs_;
  }
  return bad_epochs_ >= patience_;
}

std::string TrainingHistory::ToCsv() const {
  std::string out = "epoch,train_loss,dev_loss\n";
  for (const EpochRecord& e : epochs) {
    out += std::to_string(e.epoch) + "," + FormatDouble(e.train_loss) + "," +
           FormatDouble(e.dev_loss) + "\n";
  }
  return out;
}

double MeanLoss(const PasModel& model, const std::vector<Instance>& instances, int batch_size) {
  if (instances.empty()) return 0.0;
  double total = 0.0;
  std::vector<const ModelInput*> batch;
  for (std::size_t start = 0; start < instances.size(); start += batch_size) {
    const std::size_t end = std::min(instances.size(), start + batch_size);
    batch.clear();
    for (std::size_t i = start; i < end; ++i) batch.push_back(&instances[i].input);
    nn::Matrix<float> probs = model.Predict(batch);
    for (std::size_t i = start; i < end; ++i) {
      const double p = probs(instances[i].label(), static_cast<Eigen::Index>(i - start));
      total -= std::log(std::max(p, 1e-30));
    }
  }
  return total / static_cast<double>(instances.size());
}

namespace {

using Snapshot = std::vector<nn::Matrix<float>>;

Snapshot TakeSnapshot(PasModel& model) {
  Snapshot snap;
  for (auto& [name, m] : model.StateTensors()) snap.push_back(*m);
  return snap;
}

void RestoreSnapshot(PasModel& model, const Snapshot& snap) {
  std::size_t i = 0;
  for (auto& [name, m] : model.StateTensors()) *m = snap[i++];
}

}  // namespace

TrainingHistory Train(PasModel& model, const std::vector<Instance>& train,
                      const std::vector<Instance>& dev, const TrainingConfig& config,
                      const EpochCallback& on_epoch) {
  config.Validate();
  if (train.size() < 2) throw TrainingError("training needs at least two instances");
  const std::vector<Instance>& monitor = dev.empty() ? train : dev;
  if (dev.empty()) spdlog::warn("no development instances; early stopping monitors training loss");

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size =
      train.size() < static_cast<std::size_t>(config.batch_size) ? train.size()
                                                                 : config.batch_size;
  const std::size_t num_batches = train.size() / batch_size;

  std::vector<nn::Parameter<float>*> params = model.Parameters();
  model.ZeroGrad();
  EarlyStopper stopper(config.patience);
  TrainingHistory history;
  Snapshot best;
  const auto start = std::chrono::steady_clock::now();
  std::vector<const ModelInput*> batch;
  std::vector<int> labels;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < num_batches; ++b) {
      batch.clear();
      labels.clear();
      for (std::size_t i = b * batch_size; i < (b + 1) * batch_size; ++i) {
        const Instance& inst = train[order[i]];
        batch.push_back(&inst.input);
        labels.push_back(inst.label());
      }
      const float loss = model.TrainStep(batch, labels, rng);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite training loss " + FormatFloat(loss) + " at epoch " +
                            std::to_string(epoch) + ", batch " + std::to_string(b + 1) + " of " +
                            std::to_string(num_batches));
      }
      nn::AdamStep<float>(params, config.adam);
      loss_sum += loss;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(num_batches);
    rec.dev_loss = MeanLoss(model, monitor);
    rec.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(rec.dev_loss)) {
      throw TrainingError("non-finite development loss at epoch " + std::to_string(epoch));
    }
    spdlog::info("epoch {} train_loss {:.6f} dev_loss {:.6f} elapsed {:.1f}", epoch,
                 rec.train_loss, rec.dev_loss, rec.elapsed_seconds);
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    const bool stop = stopper.Update(rec.dev_loss);
    if (stopper.improved()) best = TakeSnapshot(model);
    if (stop) {
      history.early_stopped = epoch < config.max_epochs;
      break;
    }
  }
  RestoreSnapshot(model, best);
  history.best_epoch = stopper.best_epoch();
  history.best_dev_loss = stopper.best_loss();
  spdlog::info("best epoch {} dev_loss {:.6f}", history.best_epoch, history.best_dev_loss);
  return history;
}

std::array<double, kThresholdGridSize> ThresholdGrid() {
  std::array<double, kThresholdGridSize> grid{};
  for (int i = 0; i < kThresholdGridSize; ++i) grid[i] = i * 5 / 100.0;
  return grid;
}

double CaseF1AtThreshold(const std::vector<PredicateScores>& scores, Case c, double theta) {
  std::array<double, kNumArgCases> thresholds = {1.0, 1.0, 1.0};
  thresholds[CaseIndex(c)] = theta;
  long gold = 0, predicted = 0, correct = 0;
  for (const PredicateScores& ps : scores) {
    const Prediction p = DecodePredicate(ps, thresholds);
    const std::optional<int> g = ps.predicate().GoldFiller(c);
    const std::optional<CaseChoice>& choice = p.args[CaseIndex(c)];
    if (g) ++gold;
    if (choice) {
      ++predicted;
      if (g && *g == choice->token) ++correct;
    }
  }
  if (correct == 0) return 0.0;
  const double prec = static_cast<double>(correct) / predicted;
  const double rec = static_cast<double>(correct) / gold;
  return 2.0 * prec * rec / (prec + rec);
}

std::array<double, kNumArgCases> CalibrateThresholds(const std::vector<PredicateScores>& scores) {
  std::array<double, kNumArgCases> out = {0.0, 0.0, 0.0};
  for (Case c : kArgCases) {
    double best_f1 = -1.0;
    for (double theta : ThresholdGrid()) {
      const double f1 = CaseF1AtThreshold(scores, c, theta);
      if (f1 > best_f1) {
        best_f1 = f1;
        out[CaseIndex(c)] = theta;
      }
    }
    spdlog::debug("threshold {} = {} (F1 {:.4f})", CaseName(c), out[CaseIndex(c)], best_f1);
  }
  return out;
}

std::array<double, kNumArgCases> CalibrateThresholds(const PasModel& model,
                                                     const std::vector<Instance>& instances) {
  return CalibrateThresholds(ScoreInstances(model, instances));
}

}  // namespace pasforge
