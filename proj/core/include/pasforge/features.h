#ifndef PASFORGE_FEATURES_H_
#define PASFORGE_FEATURES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pasforge/corpus.h"

namespace pasforge {

// Feature template groups that can be ablated as a unit.
//   kWord:  surface and lemma templates (predicate, candidate, right neighbour)
//   kPath:  the naive POS+direction path string
//   kCases: case particles of the predicate's other direct dependents
enum class TemplateGroup { kWord, kPath, kCases };

std::string_view TemplateGroupName(TemplateGroup g);
std::optional<TemplateGroup> TemplateGroupFromName(std::string_view name);

struct TemplateSet {
  std::set<TemplateGroup> removed;
  // POS tags treated as (case) particles.
  std::set<std::string> particle_pos = {"PART", "PARTICLE", "助詞"};

  bool Has(TemplateGroup g) const { return removed.count(g) == 0; }
  bool IsParticle(std::string_view pos) const {
    return particle_pos.count(std::string(pos)) > 0;
  }
  // Comma list of removed group names, e.g. "word,path"; "" when none.
  std::string RemovedList() const;
  static std::set<TemplateGroup> ParseRemoved(std::string_view list);

  bool operator==(const TemplateSet&) const = default;
};

inline constexpr int kMaxPathItems = 15;
inline constexpr int kPathKeepEachSide = 7;
inline constexpr int kMaxNaivePathBunsetsus = 5;

struct PathItem {
  std::string pos;
  std::string lemma;
  Direction direction = Direction::kEnd;

  bool operator==(const PathItem&) const = default;
};

// POS/lemma/direction items from the predicate towards the candidate.
struct PathSequence {
  std::vector<PathItem> items;

  int size() const { return static_cast<int>(items.size()); }
  bool operator==(const PathSequence&) const = default;
};

// Keeps the first and last kPathKeepEachSide items of an over-long path and
// puts a single GAP item between them.
PathSequence TruncatePath(std::vector<PathItem> items);

PathSequence ExtractPathSequence(const Sentence& s, const PredicateInstance& pred, int a);

std::vector<std::string> OtherDependentsCaseMarkers(const Sentence& s,
                                                    const PredicateInstance& pred, int a,
                                                    const TemplateSet& templates = {});

std::string TokenDistanceBucket(int distance);
std::string DependencyDistanceBucket(int distance);

// Namespaced binary feature strings (pred.*, arg.*, pair.*, othercase=*) for
// the pair (pred, a). Pure: repeated calls return identical lists.
std::vector<std::string> ExtractBinaryFeatures(const Sentence& s, const PredicateInstance& pred,
                                               int a, const TemplateSet& templates);

struct BinaryFeatureVector {
  std::vector<int> indices;  // strictly increasing
  int dimension = 0;

  bool operator==(const BinaryFeatureVector&) const = default;
};

// Frozen string-to-id map. Ids follow lexicographic feature order.
class FeatureIndex {
 public:
  FeatureIndex() = default;
  FeatureIndex(std::vector<std::string> features, int min_count);

  int size() const { return static_cast<int>(features_.size()); }
  int min_count() const { return min_count_; }
  bool frozen() const { return true; }
  const std::vector<std::string>& features() const { return features_; }

  // Unknown features are not added.
  std::optional<int> Find(std::string_view feature) const;

  // Sorted "feature<TAB>id" lines.
  std::string Serialize() const;
  static FeatureIndex Deserialize(std::string_view text);
  std::uint64_t Hash() const;

  bool operator==(const FeatureIndex& o) const { return features_ == o.features_; }

 private:
  std::vector<std::string> features_;
  std::map<std::string, int, std::less<>> ids_;
  int min_count_ = 1;
};

// Counts each feature once per (predicate, candidate) pair over the training
// corpus and keeps those seen at least `min_count` times.
FeatureIndex BuildFeatureIndex(const Corpus& corpus, const TemplateSet& templates,
                               int min_count = 10);

std::map<std::string, int> CountFeatures(const Corpus& corpus, const TemplateSet& templates);

BinaryFeatureVector Vectorize(const std::vector<std::string>& features,
                              const FeatureIndex& index);

}  // namespace pasforge

#endif  // PASFORGE_FEATURES_H_
