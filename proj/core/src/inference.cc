#include "pasforge/inference.h"

#include <sstream>

#include "pasforge/errors.h"
#include "pasforge/util.h"

namespace pasforge {

Prediction DecodePredicate(const PredicateScores& scores,
                           const std::array<double, kNumArgCases>& thresholds) {
  Prediction p;
  p.sentence_id = scores.sentence_index;
  p.pred_token = scores.predicate().pred_token;
  for (Case c : kArgCases) {
    const int ci = CaseIndex(c);
    int best = -1;
    for (std::size_t k = 0; k < scores.candidates.size(); ++k) {
      if (best < 0) {
        best = static_cast<int>(k);
        continue;
      }
      const double prob = scores.probs[k][ci];
      const double top = scores.probs[best][ci];
      if (prob > top || (prob == top && scores.candidates[k] < scores.candidates[best])) {
        best = static_cast<int>(k);
      }
    }
    if (best >= 0 && scores.probs[best][ci] > thresholds[ci]) {
      p.args[ci] = CaseChoice{scores.candidates[best], scores.probs[best][ci]};
    }
  }
  return p;
}

namespace {

// Ranges [begin, end) of consecutive instances sharing a predicate.
std::vector<std::pair<std::size_t, std::size_t>> PredicateGroups(
    const std::vector<Instance>& instances) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= instances.size(); ++i) {
    if (i == instances.size() || instances[i].sentence_index != instances[begin].sentence_index ||
        instances[i].predicate_index != instances[begin].predicate_index) {
      if (i > begin) groups.emplace_back(begin, i);
      begin = i;
    }
  }
  return groups;
}

template <typename ScoreBatch>
std::vector<PredicateScores> GroupScores(const std::vector<Instance>& instances, int batch_size,
                                         ScoreBatch&& score_batch) {
  std::vector<LabelProbs> rows(instances.size());
  std::vector<const ModelInput*> batch;
  for (std::size_t start = 0; start < instances.size(); start += batch_size) {
    const std::size_t end = std::min(instances.size(), start + batch_size);
    batch.clear();
    for (std::size_t i = start; i < end; ++i) batch.push_back(&instances[i].input);
    std::vector<LabelProbs> out = score_batch(batch);
    std::copy(out.begin(), out.end(), rows.begin() + start);
  }
  std::vector<PredicateScores> scores;
  for (auto [begin, end] : PredicateGroups(instances)) {
    PredicateScores ps;
    ps.sentence = instances[begin].sentence;
    ps.sentence_index = instances[begin].sentence_index;
    ps.predicate_index = instances[begin].predicate_index;
    for (std::size_t i = begin; i < end; ++i) {
      ps.candidates.push_back(instances[i].candidate);
      ps.probs.push_back(rows[i]);
    }
    scores.push_back(std::move(ps));
  }
  return scores;
}

std::vector<LabelProbs> ToRows(const nn::Matrix<float>& probs) {
  std::vector<LabelProbs> rows(probs.cols());
  for (Eigen::Index b = 0; b < probs.cols(); ++b) {
    for (int l = 0; l < kNumLabels; ++l) rows[b][l] = probs(l, b);
  }
  return rows;
}

}  // namespace

std::vector<PredicateScores> ScoreInstances(const PasModel& model,
                                            const std::vector<Instance>& instances,
                                            int batch_size) {
  return GroupScores(instances, batch_size, [&](std::span<const ModelInput* const> batch) {
    return ToRows(model.Predict(batch));
  });
}

void CheckCompatible(const PasModel& a, const PasModel& b) {
  ModelConfig ca = a.config();
  ModelConfig cb = b.config();
  ca.seed = cb.seed = 0;
  if (!(ca == cb)) {
    throw IncompatibleModelError("ensemble members differ in configuration (" + ca.Name() +
                                 " vs " + cb.Name() + ")");
  }
  if (!(*a.lexicon().features == *b.lexicon().features)) {
    throw IncompatibleModelError("ensemble members use different feature indexes");
  }
  if (!(*a.lexicon().lemmas == *b.lexicon().lemmas) ||
      !(*a.lexicon().directions == *b.lexicon().directions)) {
    throw IncompatibleModelError("ensemble members use different vocabularies");
  }
}

LabelProbs MeanProbabilities(std::span<const LabelProbs> rows) {
  if (rows.empty()) throw std::invalid_argument("mean of zero probability rows");
  LabelProbs mean{};
  for (const LabelProbs& r : rows) {
    for (int l = 0; l < kNumLabels; ++l) mean[l] += r[l];
  }
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

std::vector<LabelProbs> EnsembleProbabilities(std::span<const PasModel* const> models,
                                              std::span<const ModelInput* const> batch) {
  if (models.empty()) throw std::invalid_argument("ensemble needs at least one model");
  for (std::size_t k = 1; k < models.size(); ++k) CheckCompatible(*models[0], *models[k]);
  std::vector<std::vector<LabelProbs>> member_rows;
  for (const PasModel* m : models) member_rows.push_back(ToRows(m->Predict(batch)));
  std::vector<LabelProbs> out(batch.size());
  std::vector<LabelProbs> column(models.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t k = 0; k < models.size(); ++k) column[k] = member_rows[k][b];
    out[b] = MeanProbabilities(column);
  }
  return out;
}

Ensemble::Ensemble(std::vector<PasModel> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("ensemble needs at least one model");
  for (std::size_t k = 1; k < members_.size(); ++k) CheckCompatible(members_[0], members_[k]);
  thresholds = members_.front().thresholds;
}

std::vector<PredicateScores> Ensemble::Score(const std::vector<Instance>& instances,
                                             int batch_size) const {
  std::vector<const PasModel*> ptrs;
  for (const PasModel& m : members_) ptrs.push_back(&m);
  return GroupScores(instances, batch_size, [&](std::span<const ModelInput* const> batch) {
    return EnsembleProbabilities(ptrs, batch);
  });
}

std::vector<Prediction> Decode(const std::vector<PredicateScores>& scores,
                               const std::array<double, kNumArgCases>& thresholds) {
  std::vector<Prediction> out;
  out.reserve(scores.size());
  for (const PredicateScores& ps : scores) out.push_back(DecodePredicate(ps, thresholds));
  return out;
}

std::string FormatPrediction(const Prediction& p) {
  std::string line = std::to_string(p.sentence_id) + " " + std::to_string(p.pred_token);
  for (Case c : kArgCases) {
    line += " ";
    line += CaseName(c);
    line += "=";
    const std::optional<CaseChoice>& choice = p.args[CaseIndex(c)];
    if (choice) {
      line += std::to_string(choice->token) + "," + FormatDouble(choice->prob);
    } else {
      line += "-";
    }
  }
  return line;
}

Prediction ParsePrediction(std::string_view line) {
  std::vector<std::string_view> f = SplitFields(line);
  if (f.size() != 2 + kNumArgCases) {
    throw ParseError("<predictions>", 0, 0,
                     "expected 5 fields in prediction line '" + std::string(line) + "'");
  }
  Prediction p;
  try {
    p.sentence_id = ParseInt(f[0]);
    p.pred_token = ParseInt(f[1]);
    for (int k = 0; k < kNumArgCases; ++k) {
      const Case c = kArgCases[k];
      std::string_view field = f[2 + k];
      const std::string prefix = std::string(CaseName(c)) + "=";
      if (field.substr(0, prefix.size()) != prefix) {
        throw std::invalid_argument("expected " + prefix + " field");
      }
      field.remove_prefix(prefix.size());
      if (field == "-") continue;
      const std::size_t comma = field.find(',');
      if (comma == std::string_view::npos) throw std::invalid_argument("expected <tok>,<prob>");
      p.args[k] = CaseChoice{ParseInt(field.substr(0, comma)), ParseDouble(field.substr(comma + 1))};
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError("<predictions>", 0, 0,
                     std::string(e.what()) + " in prediction line '" + std::string(line) + "'");
  }
  return p;
}

std::string SerializePredictions(const std::vector<Prediction>& predictions) {
  std::string out;
  for (const Prediction& p : predictions) out += FormatPrediction(p) + "\n";
  return out;
}

std::vector<Prediction> ParsePredictions(std::string_view text) {
  std::vector<Prediction> out;
  for (const std::string& line : Split(text, '\n')) {
    if (Trim(line).empty()) continue;
    out.push_back(ParsePrediction(line));
  }
  return out;
}

void WritePredictionFile(const std::filesystem::path& path,
                         const std::vector<Prediction>& predictions) {
  WriteFile(path, SerializePredictions(predictions));
}

std::vector<Prediction> ReadPredictionFile(const std::filesystem::path& path) {
  return ParsePredictions(ReadFile(path));
}

}  // namespace pasforge
