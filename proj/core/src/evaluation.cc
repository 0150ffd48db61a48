#include "pasforge/evaluation.h"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pasforge/util.h"

namespace pasforge {

std::string_view StratumName(Stratum s) {
  switch (s) {
    case Stratum::kOverall: return "ALL";
    case Stratum::kDep: return "Dep";
    case Stratum::kZero: return "Zero";
    case Stratum::kDist2: return "2";
    case Stratum::kDist3: return "3";
    case Stratum::kDist4: return "4";
    case Stratum::kDist5Plus: return ">=5";
  }
  return "?";
}

Stratum DistanceBucket(int d) {
  if (d <= 1) return Stratum::kDep;
  if (d == 2) return Stratum::kDist2;
  if (d == 3) return Stratum::kDist3;
  if (d == 4) return Stratum::kDist4;
  return Stratum::kDist5Plus;
}

double Counts::Precision() const {
  return predicted > 0 ? static_cast<double>(correct) / predicted : 0.0;
}

double Counts::Recall() const { return gold > 0 ? static_cast<double>(correct) / gold : 0.0; }

double Counts::F1() const {
  const double p = Precision();
  const double r = Recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

Counts& Counts::operator+=(const Counts& o) {
  gold += o.gold;
  predicted += o.predicted;
  correct += o.correct;
  return *this;
}

std::string_view RowName(int row) {
  if (row == kAllRow) return "ALL";
  return CaseName(kArgCases.at(row));
}

double EvalReport::F1(int row, Stratum s) const {
  if (num_runs > 0) return runs[row][static_cast<int>(s)].mean;
  return at(row, s).F1();
}

double EvalReport::Sigma(int row, Stratum s) const {
  if (num_runs > 0) return runs[row][static_cast<int>(s)].sigma;
  return 0.0;
}

namespace {

enum class Field { kGold, kPredicted, kCorrect };

void Bump(EvalReport& r, int case_row, int distance, Field field) {
  const Stratum bucket = DistanceBucket(distance);
  for (int row : {case_row, kAllRow}) {
    std::vector<Stratum> strata = {Stratum::kOverall, bucket};
    if (bucket != Stratum::kDep) strata.push_back(Stratum::kZero);
    for (Stratum s : strata) {
      Counts& c = r.at(row, s);
      switch (field) {
        case Field::kGold: ++c.gold; break;
        case Field::kPredicted: ++c.predicted; break;
        case Field::kCorrect: ++c.correct; break;
      }
    }
  }
}

}  // namespace

EvalReport Evaluate(const Corpus& gold, const std::vector<Prediction>& predictions) {
  std::map<std::pair<int, int>, const Prediction*> by_key;
  for (const Prediction& p : predictions) {
    if (p.sentence_id < 0 || p.sentence_id >= static_cast<int>(gold.size())) {
      throw std::invalid_argument("prediction for unknown sentence " + std::to_string(p.sentence_id));
    }
    const Sentence& s = gold[p.sentence_id];
    bool found = false;
    for (const PredicateInstance& pred : s.predicates()) found |= pred.pred_token == p.pred_token;
    if (!found) {
      throw std::invalid_argument("prediction for unknown predicate " +
                                  std::to_string(p.sentence_id) + ":" +
                                  std::to_string(p.pred_token));
    }
    if (!by_key.emplace(std::make_pair(p.sentence_id, p.pred_token), &p).second) {
      throw std::invalid_argument("duplicate prediction for predicate " +
                                  std::to_string(p.sentence_id) + ":" +
                                  std::to_string(p.pred_token));
    }
  }

  EvalReport report;
  for (int si = 0; si < static_cast<int>(gold.size()); ++si) {
    const Sentence& s = gold[si];
    for (const PredicateInstance& pred : s.predicates()) {
      auto it = by_key.find({si, pred.pred_token});
      const Prediction* p = it == by_key.end() ? nullptr : it->second;
      for (Case c : kArgCases) {
        const int row = CaseIndex(c);
        const std::optional<int> g = pred.GoldFiller(c);
        if (g) Bump(report, row, DependencyDistance(s, pred.pred_token, *g), Field::kGold);
        if (!p || !p->args[row]) continue;
        const int t = p->args[row]->token;
        if (t < 0 || t >= s.num_tokens()) {
          throw std::invalid_argument("predicted token " + std::to_string(t) +
                                      " outside sentence " + std::to_string(si));
        }
        Bump(report, row, DependencyDistance(s, pred.pred_token, t), Field::kPredicted);
        if (g && *g == t) Bump(report, row, DependencyDistance(s, pred.pred_token, t),
                               Field::kCorrect);
      }
    }
  }
  return report;
}

EvalReport AggregateRuns(std::span<const EvalReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate of zero reports");
  EvalReport out;
  const double k = static_cast<double>(reports.size());
  for (int row = 0; row < kNumRows; ++row) {
    for (int si = 0; si < kNumStrata; ++si) {
      RunStats& stats = out.runs[row][si];
      for (const EvalReport& r : reports) {
        out.cells[row][si] += r.cells[row][si];
        stats.f1s.push_back(r.cells[row][si].F1());
      }
      double sum = 0.0;
      for (double f : stats.f1s) sum += f;
      stats.mean = sum / k;
      double sq = 0.0;
      for (double f : stats.f1s) sq += (f - stats.mean) * (f - stats.mean);
      stats.sigma = std::sqrt(sq / k);
    }
  }
  out.num_runs = static_cast<int>(reports.size());
  return out;
}

std::vector<std::string> ReportColumns() {
  return {"ALL-F1", "ALL-sigma", "ALL-P", "ALL-R", "Dep-F1",
          "Zero-F1", "F1@2",     "F1@3",  "F1@4",  "F1@>=5"};
}

std::vector<double> ReportRow(const EvalReport& r, int row) {
  const Counts& all = r.at(row, Stratum::kOverall);
  return {r.F1(row, Stratum::kOverall), r.Sigma(row, Stratum::kOverall),
          all.Precision(),              all.Recall(),
          r.F1(row, Stratum::kDep),     r.F1(row, Stratum::kZero),
          r.F1(row, Stratum::kDist2),   r.F1(row, Stratum::kDist3),
          r.F1(row, Stratum::kDist4),   r.F1(row, Stratum::kDist5Plus)};
}

namespace {

std::string Percent(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << 100.0 * v;
  return out.str();
}

std::string CsvField(const std::string& v) {
  if (v.find_first_of(",\"") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string FormatTable(const std::vector<TableRow>& rows) {
  std::size_t model_w = 5, binary_w = 12;
  for (const TableRow& r : rows) {
    model_w = std::max(model_w, r.model.size());
    binary_w = std::max(binary_w, r.binary.size());
  }
  const std::vector<std::string> columns = ReportColumns();
  std::ostringstream out;
  for (int row : {kAllRow, 0, 1, 2}) {
    out << "[" << RowName(row) << "]\n";
    out << std::left << std::setw(model_w + 2) << "Model" << std::setw(binary_w + 2)
        << "Binary feats.";
    for (const std::string& c : columns) out << std::right << std::setw(10) << c;
    out << "\n";
    for (const TableRow& r : rows) {
      out << std::left << std::setw(model_w + 2) << r.model << std::setw(binary_w + 2) << r.binary;
      for (double v : ReportRow(r.report, row)) out << std::right << std::setw(10) << Percent(v);
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

std::string FormatCsv(const std::vector<TableRow>& rows) {
  std::string out = "model,binary,case," + Join(ReportColumns(), ",") + "\n";
  for (const TableRow& r : rows) {
    for (int row : {kAllRow, 0, 1, 2}) {
      out += CsvField(r.model) + "," + CsvField(r.binary) + "," + std::string(RowName(row));
      for (double v : ReportRow(r.report, row)) out += "," + FormatDouble(v);
      out += "\n";
    }
  }
  return out;
}

}  // namespace pasforge
