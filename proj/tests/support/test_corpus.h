#ifndef PASFORGE_TESTS_TEST_CORPUS_H_
#define PASFORGE_TESTS_TEST_CORPUS_H_

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pasforge/corpus.h"

namespace pasforge::testing {

inline Corpus CorpusFromText(const std::string& text) {
  std::istringstream in(text);
  return ParseCorpus(in, "<test>");
}

inline Sentence SentenceFromText(const std::string& text) { return CorpusFromText(text).at(0); }

// A sentence with one single-token bunsetsu per entry of `heads`; token i is
// noun "w<i>" unless it is listed as a predicate.
inline Sentence TreeSentence(const std::vector<int>& heads,
                             std::vector<PredicateInstance> predicates = {}) {
  std::vector<Token> tokens;
  std::vector<Bunsetsu> bunsetsus;
  for (int i = 0; i < static_cast<int>(heads.size()); ++i) {
    Token t;
    t.index = i;
    t.surface = t.lemma = "w" + std::to_string(i);
    t.pos = "NOUN";
    t.bunsetsu_id = i;
    tokens.push_back(t);
    bunsetsus.push_back({i, i, i, i, heads[i]});
  }
  for (const PredicateInstance& p : predicates) tokens[p.pred_token].pos = "VERB";
  return Sentence(std::move(tokens), std::move(bunsetsus), std::move(predicates));
}

// Uniformly random rooted tree over n nodes: a random permutation where every
// node after the first attaches to an earlier one.
inline std::vector<int> RandomHeads(int n, std::mt19937_64& rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(n, Bunsetsu::kRoot);
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    heads[order[k]] = order[pick(rng)];
  }
  return heads;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("pasforge-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace pasforge::testing

#endif  // PASFORGE_TESTS_TEST_CORPUS_H_
