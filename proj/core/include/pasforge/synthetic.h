#ifndef PASFORGE_SYNTHETIC_H_
#define PASFORGE_SYNTHETIC_H_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pasforge/corpus.h"

namespace pasforge {

// Seeded generator of dependency-parsed sentences with annotated predicates.
//
// Sentences are a chain of clauses v0 <- v1 <- ... where each embedded verb
// depends on the verb above it. Overt ga/wo/ni dependents are NOM/ACC/DAT.
// An embedded verb without an overt ga takes its NOM from outside its clause:
//   - governor is a control verb: the governor's NOM when the embedded verb
//     has an overt wo, otherwise the governor's DAT;
//   - otherwise the sentence topic (wa), if there is one.
// Relative clauses fill their gap with the modified noun: NOM when the clause
// has an overt wo, ACC when it has an overt ga. "A no B" modifiers, place
// nouns (de) and voice auxiliaries are distractors.
struct SyntheticConfig {
  int num_sentences = 100;
  int noun_vocab = 60;
  int verb_vocab = 16;
  int max_clauses = 5;
  double modifier_rate = 0.2;
  double relative_rate = 0.08;
  double zero_fraction = 0.3;
  double place_rate = 0.15;
  double voice_rate = 0.2;
  std::uint64_t seed = 1;

  void Validate() const;
  bool Set(std::string_view key, std::string_view value);
};

struct SyntheticStats {
  long predicates = 0;
  long gold_args = 0;
  long zero_args = 0;
  std::vector<int> token_counts;  // per sentence

  double ZeroFraction() const {
    return gold_args > 0 ? static_cast<double>(zero_args) / gold_args : 0.0;
  }
};

struct SyntheticCorpus {
  Corpus corpus;
  SyntheticStats stats;
  std::set<std::string> control_verbs;
};

std::string SyntheticNoun(int i);
std::string SyntheticVerb(int i);

SyntheticCorpus GenerateSynthetic(const SyntheticConfig& config);

}  // namespace pasforge

#endif  // PASFORGE_SYNTHETIC_H_
