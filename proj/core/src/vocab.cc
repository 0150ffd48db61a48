#include "pasforge/vocab.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pasforge/errors.h"
#include "pasforge/util.h"

namespace pasforge {

std::string_view VocabKindName(VocabKind kind) {
  switch (kind) {
    case VocabKind::kLemma: return "lemma";
    case VocabKind::kPos: return "pos";
    case VocabKind::kDirection: return "direction";
  }
  return "?";
}

Vocabulary::Vocabulary(VocabKind kind, std::vector<std::string> symbols)
    : kind_(kind), symbols_(std::move(symbols)) {
  ids_.reserve(symbols_.size());
  for (int i = 0; i < size(); ++i) {
    if (!ids_.emplace(symbols_[i], i).second) {
      throw ValidationError("duplicate vocabulary symbol '" + symbols_[i] + "'");
    }
  }
  if (!Find(kPad) || !Find(kPathGap)) {
    throw ValidationError("vocabulary is missing the PAD or GAP symbol");
  }
}

std::optional<int> Vocabulary::Find(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::Id(std::string_view symbol) const {
  if (auto id = Find(symbol)) return *id;
  throw std::out_of_range("symbol '" + std::string(symbol) + "' is not in the " +
                          std::string(VocabKindName(kind_)) + " vocabulary");
}

std::string Vocabulary::Serialize() const {
  std::string out = "kind=" + std::string(VocabKindName(kind_)) + "\n";
  for (const std::string& s : symbols_) {
    out += s;
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::Deserialize(std::string_view text) {
  std::vector<std::string> lines = Split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0].rfind("kind=", 0) != 0) {
    throw ValidationError("vocabulary file must start with a kind= line");
  }
  std::string_view kind_name = std::string_view(lines[0]).substr(5);
  VocabKind kind;
  if (kind_name == "lemma") {
    kind = VocabKind::kLemma;
  } else if (kind_name == "pos") {
    kind = VocabKind::kPos;
  } else if (kind_name == "direction") {
    kind = VocabKind::kDirection;
  } else {
    throw ValidationError("unknown vocabulary kind '" + std::string(kind_name) + "'");
  }
  lines.erase(lines.begin());
  return Vocabulary(kind, std::move(lines));
}

std::uint64_t Vocabulary::Hash() const { return Fnv1a64(Serialize()); }

Vocabulary BuildVocab(const Corpus& corpus, VocabKind kind, int min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be at least 1");
  if (corpus.empty()) throw std::invalid_argument("cannot build a vocabulary from an empty corpus");

  std::vector<std::string> symbols = {std::string(Vocabulary::kPad),
                                      std::string(Vocabulary::kPathGap)};
  if (kind == VocabKind::kDirection) return DirectionVocab();

  std::set<std::string> pos_tags;
  std::map<std::string, int> lemma_counts;
  for (const Sentence& s : corpus) {
    for (const Token& t : s.tokens()) {
      pos_tags.insert(t.pos);
      ++lemma_counts[t.lemma];
    }
  }
  std::set<std::string> emitted(symbols.begin(), symbols.end());
  for (const std::string& p : pos_tags) {
    if (emitted.insert(p).second) symbols.push_back(p);
  }
  if (kind == VocabKind::kLemma) {
    for (const auto& [lemma, count] : lemma_counts) {
      if (count >= min_count && emitted.insert(lemma).second) symbols.push_back(lemma);
    }
  }
  return Vocabulary(kind, std::move(symbols));
}

std::string_view DirectionSymbol(Direction d) {
  return d == Direction::kGap ? Vocabulary::kPathGap : DirectionName(d);
}

Vocabulary DirectionVocab() {
  return Vocabulary(VocabKind::kDirection,
                    {std::string(Vocabulary::kPad), std::string(Vocabulary::kPathGap), "UP",
                     "DOWN", "END"});
}

int Lookup(const Vocabulary& vocab, std::string_view lemma, std::string_view pos) {
  if (auto id = vocab.Find(lemma)) return *id;
  if (auto id = vocab.Find(pos)) return *id;
  throw std::out_of_range("neither lemma '" + std::string(lemma) + "' nor POS '" +
                          std::string(pos) + "' is in the vocabulary");
}

EmbeddingTable RandomEmbeddingTable(std::shared_ptr<const Vocabulary> vocab, int dim,
                                    std::mt19937_64& rng) {
  if (dim <= 0) throw std::invalid_argument("embedding dim must be positive");
  EmbeddingTable table;
  table.dim = dim;
  table.weights.resize(dim, vocab->size());
  std::uniform_real_distribution<float> uniform(-kOovInitRange, kOovInitRange);
  for (Eigen::Index j = 0; j < table.weights.cols(); ++j) {
    for (Eigen::Index i = 0; i < table.weights.rows(); ++i) table.weights(i, j) = uniform(rng);
  }
  table.vocab = std::move(vocab);
  return table;
}

PretrainedLoad LoadPretrained(const std::filesystem::path& path,
                              std::shared_ptr<const Vocabulary> vocab, int expected_dim,
                              std::mt19937_64& rng) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word-vector file " + path.string());
  const std::string source = path.string();

  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, 1, "missing header line");
  std::vector<std::string_view> header = SplitFields(line);
  if (header.size() != 2) throw ParseError(source, 1, 1, "header must be '<count> <dim>'");
  int count = 0;
  int dim = 0;
  try {
    count = ParseInt(header[0]);
    dim = ParseInt(header[1]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 1, 1, e.what());
  }
  if (count < 0 || dim <= 0) throw ParseError(source, 1, 1, "header count/dim out of range");
  if (dim != expected_dim) {
    throw ConfigError(source + ": vector dim " + std::to_string(dim) +
                      " does not match the configured dim " + std::to_string(expected_dim));
  }

  PretrainedLoad result;
  result.table = RandomEmbeddingTable(vocab, dim, rng);
  std::vector<bool> filled(vocab->size(), false);
  int rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    std::vector<std::string_view> fields = SplitFields(line);
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw ParseError(source, line_no, 1,
                       "expected a symbol and " + std::to_string(dim) + " values, found " +
                           std::to_string(fields.size() - 1) + " values");
    }
    ++rows;
    Eigen::VectorXf values(dim);
    for (int k = 0; k < dim; ++k) {
      try {
        values[k] = ParseFloat(fields[k + 1]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(source, line_no, static_cast<int>(fields[k + 1].data() - line.data()) + 1,
                         e.what());
      }
      if (!std::isfinite(values[k])) {
        throw ParseError(source, line_no,
                         static_cast<int>(fields[k + 1].data() - line.data()) + 1,
                         "non-finite embedding value");
      }
    }
    std::optional<int> id = vocab->Find(fields[0]);
    if (!id || filled[*id]) continue;
    filled[*id] = true;
    result.table.weights.col(*id) = values;
    ++result.copied_rows;
  }
  if (rows != count) {
    throw ParseError(source, line_no, 1,
                     "header declares " + std::to_string(count) + " rows, found " +
                         std::to_string(rows));
  }
  return result;
}

void SaveWordVectors(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::string out = std::to_string(table.vocab->size()) + " " + std::to_string(table.dim) + "\n";
  for (int id = 0; id < table.vocab->size(); ++id) {
    out += table.vocab->Symbol(id);
    for (int k = 0; k < table.dim; ++k) {
      out += ' ';
      out += FormatFloat(table.weights(k, id));
    }
    out += '\n';
  }
  WriteFile(path, out);
}

}  // namespace pasforge
