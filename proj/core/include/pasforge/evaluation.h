#ifndef PASFORGE_EVALUATION_H_
#define PASFORGE_EVALUATION_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pasforge/corpus.h"
#include "pasforge/inference.h"

namespace pasforge {

enum class Stratum { kOverall, kDep, kZero, kDist2, kDist3, kDist4, kDist5Plus };
inline constexpr int kNumStrata = 7;
inline constexpr std::array<Stratum, kNumStrata> kAllStrata = {
    Stratum::kOverall, Stratum::kDep,   Stratum::kZero,     Stratum::kDist2,
    Stratum::kDist3,   Stratum::kDist4, Stratum::kDist5Plus};

std::string_view StratumName(Stratum s);

// Dep for distance <= 1, otherwise the Zero bucket for the distance.
Stratum DistanceBucket(int dependency_distance);

struct Counts {
  long gold = 0;
  long predicted = 0;
  long correct = 0;

  double Precision() const;
  double Recall() const;
  double F1() const;

  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

// Row index for the ALL aggregate next to the three case rows.
inline constexpr int kAllRow = kNumArgCases;
inline constexpr int kNumRows = kNumArgCases + 1;

std::string_view RowName(int row);

struct RunStats {
  std::vector<double> f1s;
  double mean = 0.0;
  double sigma = 0.0;
};

struct EvalReport {
  // cells[row][stratum]; rows are NOM, ACC, DAT, ALL.
  std::array<std::array<Counts, kNumStrata>, kNumRows> cells{};
  // Filled by AggregateRuns. Empty for a single evaluation.
  std::array<std::array<RunStats, kNumStrata>, kNumRows> runs{};
  int num_runs = 0;

  const Counts& at(int row, Stratum s) const { return cells[row][static_cast<int>(s)]; }
  Counts& at(int row, Stratum s) { return cells[row][static_cast<int>(s)]; }
  // Mean F1 across runs when aggregated, otherwise the cell's F1.
  double F1(int row, Stratum s) const;
  double Sigma(int row, Stratum s) const;
};

// Throws std::invalid_argument for predictions that name a predicate absent
// from `gold`.
EvalReport Evaluate(const Corpus& gold, const std::vector<Prediction>& predictions);

// Summed counts plus per-cell mean F1 and population standard deviation.
EvalReport AggregateRuns(std::span<const EvalReport> reports);

// Column headers shared by the text and CSV reports.
std::vector<std::string> ReportColumns();
std::vector<double> ReportRow(const EvalReport& report, int row);

struct TableRow {
  std::string model;
  std::string binary;
  EvalReport report;
};

// Aligned plain text: one block per row kind (ALL, NOM, ACC, DAT), one line
// per table row. Values are percentages.
std::string FormatTable(const std::vector<TableRow>& rows);
std::string FormatCsv(const std::vector<TableRow>& rows);

}  // namespace pasforge

#endif  // PASFORGE_EVALUATION_H_
