#ifndef PASFORGE_VOCAB_H_
#define PASFORGE_VOCAB_H_

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pasforge/corpus.h"

namespace pasforge {

enum class VocabKind { kLemma, kPos, kDirection };

std::string_view VocabKindName(VocabKind kind);

// Symbol table with contiguous ids. Lemma vocabularies also hold every POS tag
// so that rare or unseen lemmas can fall back to their POS row.
class Vocabulary {
 public:
  static constexpr std::string_view kPad = "<PAD>";
  static constexpr std::string_view kPathGap = "<GAP>";

  Vocabulary(VocabKind kind, std::vector<std::string> symbols);

  VocabKind kind() const { return kind_; }
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& Symbol(int id) const { return symbols_.at(id); }

  std::optional<int> Find(std::string_view symbol) const;
  // Throws std::out_of_range for unknown symbols.
  int Id(std::string_view symbol) const;

  // "kind=<name>" line followed by one symbol per line, in id order.
  std::string Serialize() const;
  static Vocabulary Deserialize(std::string_view text);
  std::uint64_t Hash() const;

  bool operator==(const Vocabulary& other) const {
    return kind_ == other.kind_ && symbols_ == other.symbols_;
  }

 private:
  VocabKind kind_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
};

// Lemmas seen fewer than `min_count` times are left out; lookups for them
// resolve to their POS symbol instead.
Vocabulary BuildVocab(const Corpus& corpus, VocabKind kind, int min_count);

// The fixed direction alphabet: PAD, GAP, UP, DOWN, END.
Vocabulary DirectionVocab();
std::string_view DirectionSymbol(Direction d);

// Embedding row for a token: the lemma's own row when present, otherwise the
// row of its POS. Throws std::out_of_range when neither is in `vocab`.
int Lookup(const Vocabulary& vocab, std::string_view lemma, std::string_view pos);

inline constexpr float kOovInitRange = 0.05f;

// Embedding matrix stored column-per-symbol: weights.col(id) is the vector of
// vocab->Symbol(id).
struct EmbeddingTable {
  std::shared_ptr<const Vocabulary> vocab;
  int dim = 0;
  Eigen::MatrixXf weights;
  bool trainable = true;
};

EmbeddingTable RandomEmbeddingTable(std::shared_ptr<const Vocabulary> vocab, int dim,
                                    std::mt19937_64& rng);

struct PretrainedLoad {
  EmbeddingTable table;
  int copied_rows = 0;
};

// Reads the word-vector text format ("<count> <dim>" header, then
// "<symbol> <v1> ... <v_dim>" lines). Every row starts from uniform noise and
// rows for symbols present in the file are overwritten with the file values.
PretrainedLoad LoadPretrained(const std::filesystem::path& path,
                              std::shared_ptr<const Vocabulary> vocab, int expected_dim,
                              std::mt19937_64& rng);

void SaveWordVectors(const std::filesystem::path& path, const EmbeddingTable& table);

}  // namespace pasforge

#endif  // PASFORGE_VOCAB_H_
