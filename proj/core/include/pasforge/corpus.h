#ifndef PASFORGE_CORPUS_H_
#define PASFORGE_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pasforge {

// Case labels. The numeric values are the softmax output rows.
enum class Case : std::uint8_t { kNom = 0, kAcc = 1, kDat = 2, kNone = 3 };

inline constexpr int kNumLabels = 4;
inline constexpr int kNumArgCases = 3;
inline constexpr std::array<Case, kNumArgCases> kArgCases = {Case::kNom, Case::kAcc,
                                                            Case::kDat};

std::string_view CaseName(Case c);
std::optional<Case> CaseFromName(std::string_view name);
inline int CaseIndex(Case c) { return static_cast<int>(c); }

// Direction of one step along the bunsetsu tree. kEnd terminates a path; kGap
// marks the items dropped from the middle of a truncated path.
enum class Direction : std::uint8_t { kUp = 0, kDown = 1, kEnd = 2, kGap = 3 };

std::string_view DirectionName(Direction d);

inline constexpr std::array<std::string_view, 4> kVoiceSuffixes = {"reru", "seru", "dekiru",
                                                                  "tearu"};

struct Token {
  int index = 0;
  std::string surface;
  std::string lemma;
  std::string pos;
  std::string conj_form;  // empty when the token does not conjugate
  std::string ne_tag = "O";
  int bunsetsu_id = 0;

  bool operator==(const Token&) const = default;
};

struct Bunsetsu {
  static constexpr int kRoot = -1;

  int id = 0;
  int first_token = 0;
  int last_token = 0;  // inclusive
  int head_token = 0;
  int dep_head = kRoot;

  bool operator==(const Bunsetsu&) const = default;
};

struct PredicateInstance {
  int pred_token = 0;
  std::vector<std::string> voice_suffixes;  // sorted, unique
  std::optional<std::string> nominal_form;
  // Intra-sentential filler head per argument case, indexed by CaseIndex.
  std::array<std::optional<int>, kNumArgCases> gold;

  std::optional<int> GoldFiller(Case c) const { return gold[CaseIndex(c)]; }

  bool operator==(const PredicateInstance&) const = default;
};

struct PathStep {
  int bunsetsu = 0;
  Direction direction = Direction::kEnd;

  bool operator==(const PathStep&) const = default;
};

// A dependency-parsed sentence. Construction validates every cross-reference
// and the bunsetsu tree; instances are immutable afterwards.
class Sentence {
 public:
  // Throws ValidationError when an invariant does not hold.
  Sentence(std::vector<Token> tokens, std::vector<Bunsetsu> bunsetsus,
           std::vector<PredicateInstance> predicates);

  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<Bunsetsu>& bunsetsus() const { return bunsetsus_; }
  const std::vector<PredicateInstance>& predicates() const { return predicates_; }

  int num_tokens() const { return static_cast<int>(tokens_.size()); }
  int num_bunsetsus() const { return static_cast<int>(bunsetsus_.size()); }
  const Token& token(int index) const { return tokens_[index]; }
  const Bunsetsu& bunsetsu(int id) const { return bunsetsus_[id]; }
  const Bunsetsu& bunsetsu_of(int token_index) const {
    return bunsetsus_[tokens_[token_index].bunsetsu_id];
  }

  // Bunsetsus whose dep_head is `id`, in increasing id order.
  const std::vector<int>& dependents(int id) const { return dependents_[id]; }
  int root() const { return root_; }
  int depth(int id) const { return depth_[id]; }

  bool operator==(const Sentence& other) const {
    return tokens_ == other.tokens_ && bunsetsus_ == other.bunsetsus_ &&
           predicates_ == other.predicates_;
  }

 private:
  void Validate();

  std::vector<Token> tokens_;
  std::vector<Bunsetsu> bunsetsus_;
  std::vector<PredicateInstance> predicates_;
  std::vector<std::vector<int>> dependents_;
  std::vector<int> depth_;
  int root_ = 0;
};

using Corpus = std::vector<Sentence>;

// Unique tree path from `from_b` to `to_b`. Each step carries the direction of
// the move to the next element; the last element carries kEnd.
std::vector<PathStep> BunsetsuPath(const Sentence& s, int from_b, int to_b);

// Edge count between the bunsetsus containing tokens p and a.
int DependencyDistance(const Sentence& s, int p, int a);

// Label of token `a` for `pred`. A token filling several slots resolves to the
// first of NOM > ACC > DAT and logs a warning.
Case GoldLabelOf(const PredicateInstance& pred, int a);

// Line-oriented corpus format: T, B and P records per sentence, sentences
// separated by blank lines.
Corpus ParseCorpus(std::istream& in, const std::string& source_name = "<stream>");
Corpus ParseCorpusFile(const std::filesystem::path& path);
void SerializeCorpus(std::ostream& out, const Corpus& corpus);
std::string SerializeCorpus(const Corpus& corpus);
void WriteCorpusFile(const std::filesystem::path& path, const Corpus& corpus);

}  // namespace pasforge

#endif  // PASFORGE_CORPUS_H_
