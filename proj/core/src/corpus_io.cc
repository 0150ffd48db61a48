#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pasforge/corpus.h"
#include "pasforge/errors.h"
#include "pasforge/util.h"

namespace pasforge {
namespace {

struct Field {
  std::string_view text;
  int column;  // 1-based
};

class SentenceBuilder {
 public:
  SentenceBuilder(const std::string& source) : source_(source) {}

  bool empty() const { return tokens_.empty() && bunsetsus_.empty() && predicates_.empty(); }

  void AddLine(std::string_view line, int line_no) {
    if (empty()) first_line_ = line_no;
    std::vector<Field> fields;
    for (std::string_view f : SplitFields(line)) {
      fields.push_back({f, static_cast<int>(f.data() - line.data()) + 1});
    }
    line_no_ = line_no;
    const std::string_view kind = fields[0].text;
    if (kind == "T") {
      if (!bunsetsus_.empty() || !predicates_.empty()) {
        Fail(fields[0], "T record after B or P records");
      }
      ParseToken(fields);
    } else if (kind == "B") {
      if (!predicates_.empty()) Fail(fields[0], "B record after P records");
      ParseBunsetsu(fields);
    } else if (kind == "P") {
      ParsePredicate(fields);
    } else {
      Fail(fields[0], "unknown record kind '" + std::string(kind) + "'");
    }
  }

  Sentence Finish() {
    try {
      Sentence s(std::move(tokens_), std::move(bunsetsus_), std::move(predicates_));
      Reset();
      return s;
    } catch (const ValidationError& e) {
      Reset();
      throw ValidationError(source_ + ":" + std::to_string(first_line_) +
                            ": invalid sentence: " + e.what());
    }
  }

 private:
  [[noreturn]] void Fail(const Field& f, const std::string& message) const {
    throw ParseError(source_, line_no_, f.column, message);
  }

  void ExpectFields(const std::vector<Field>& fields, std::size_t n) const {
    if (fields.size() != n) {
      const Field& at = fields.size() > n ? fields[n] : fields.back();
      Fail(at, std::string(fields[0].text) + " record needs " + std::to_string(n - 1) +
                   " fields, found " + std::to_string(fields.size() - 1));
    }
  }

  int Int(const Field& f) const {
    try {
      return ParseInt(f.text);
    } catch (const std::invalid_argument& e) {
      Fail(f, e.what());
    }
  }

  static std::string Optional(std::string_view text) {
    return text == "_" ? std::string() : std::string(text);
  }

  void ParseToken(const std::vector<Field>& f) {
    ExpectFields(f, 8);
    Token t;
    t.index = Int(f[1]);
    if (t.index != static_cast<int>(tokens_.size())) {
      Fail(f[1], "expected token index " + std::to_string(tokens_.size()));
    }
    t.surface = std::string(f[2].text);
    t.lemma = std::string(f[3].text);
    t.pos = std::string(f[4].text);
    t.conj_form = Optional(f[5].text);
    t.ne_tag = std::string(f[6].text);
    t.bunsetsu_id = Int(f[7]);
    tokens_.push_back(std::move(t));
  }

  void ParseBunsetsu(const std::vector<Field>& f) {
    ExpectFields(f, 6);
    Bunsetsu b;
    b.id = Int(f[1]);
    if (b.id != static_cast<int>(bunsetsus_.size())) {
      Fail(f[1], "expected bunsetsu id " + std::to_string(bunsetsus_.size()));
    }
    b.first_token = Int(f[2]);
    b.last_token = Int(f[3]);
    b.head_token = Int(f[4]);
    b.dep_head = Int(f[5]);
    if (b.dep_head < Bunsetsu::kRoot) Fail(f[5], "dep_head must be -1 or a bunsetsu id");
    bunsetsus_.push_back(b);
  }

  void ParsePredicate(const std::vector<Field>& f) {
    ExpectFields(f, 7);
    PredicateInstance p;
    p.pred_token = Int(f[1]);
    if (f[2].text != "_") {
      for (std::string& v : Split(f[2].text, ',')) {
        if (std::find(kVoiceSuffixes.begin(), kVoiceSuffixes.end(), v) == kVoiceSuffixes.end()) {
          Fail(f[2], "unknown voice suffix '" + v + "'");
        }
        p.voice_suffixes.push_back(std::move(v));
      }
      std::sort(p.voice_suffixes.begin(), p.voice_suffixes.end());
      p.voice_suffixes.erase(std::unique(p.voice_suffixes.begin(), p.voice_suffixes.end()),
                             p.voice_suffixes.end());
    }
    if (f[3].text != "_") p.nominal_form = std::string(f[3].text);
    for (int k = 0; k < kNumArgCases; ++k) {
      const Field& field = f[4 + k];
      const std::string prefix = std::string(CaseName(kArgCases[k])) + "=";
      if (field.text.substr(0, prefix.size()) != prefix) {
        Fail(field, "expected " + prefix + "<token|->");
      }
      std::string_view value = field.text.substr(prefix.size());
      if (value != "-") {
        Field v{value, field.column + static_cast<int>(prefix.size())};
        p.gold[k] = Int(v);
      }
    }
    predicates_.push_back(std::move(p));
  }

  void Reset() {
    tokens_.clear();
    bunsetsus_.clear();
    predicates_.clear();
  }

  const std::string& source_;
  int first_line_ = 0;
  int line_no_ = 0;
  std::vector<Token> tokens_;
  std::vector<Bunsetsu> bunsetsus_;
  std::vector<PredicateInstance> predicates_;
};

}  // namespace

Corpus ParseCorpus(std::istream& in, const std::string& source_name) {
  Corpus corpus;
  SentenceBuilder builder(source_name);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) {
      if (!builder.empty()) corpus.push_back(builder.Finish());
      continue;
    }
    builder.AddLine(line, line_no);
  }
  if (!builder.empty()) corpus.push_back(builder.Finish());
  return corpus;
}

Corpus ParseCorpusFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path.string());
  return ParseCorpus(in, path.string());
}

void SerializeCorpus(std::ostream& out, const Corpus& corpus) {
  auto opt = [](const std::string& s) -> const std::string& {
    static const std::string kBlank = "_";
    return s.empty() ? kBlank : s;
  };
  bool first = true;
  for (const Sentence& s : corpus) {
    if (!first) out << '\n';
    first = false;
    for (const Token& t : s.tokens()) {
      out << "T " << t.index << ' ' << t.surface << ' ' << t.lemma << ' ' << t.pos << ' '
          << opt(t.conj_form) << ' ' << t.ne_tag << ' ' << t.bunsetsu_id << '\n';
    }
    for (const Bunsetsu& b : s.bunsetsus()) {
      out << "B " << b.id << ' ' << b.first_token << ' ' << b.last_token << ' ' << b.head_token
          << ' ' << b.dep_head << '\n';
    }
    for (const PredicateInstance& p : s.predicates()) {
      out << "P " << p.pred_token << ' '
          << (p.voice_suffixes.empty() ? std::string("_") : Join(p.voice_suffixes, ",")) << ' '
          << (p.nominal_form ? *p.nominal_form : std::string("_"));
      for (Case c : kArgCases) {
        out << ' ' << CaseName(c) << '=';
        if (auto g = p.GoldFiller(c)) {
          out << *g;
        } else {
          out << '-';
        }
      }
      out << '\n';
    }
  }
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::ostringstream out;
  SerializeCorpus(out, corpus);
  return out.str();
}

void WriteCorpusFile(const std::filesystem::path& path, const Corpus& corpus) {
  WriteFile(path, SerializeCorpus(corpus));
}

}  // namespace pasforge
