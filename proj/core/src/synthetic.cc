#include "pasforge/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <random>

#include "pasforge/errors.h"
#include "pasforge/util.h"

namespace pasforge {

void SyntheticConfig::Validate() const {
  if (num_sentences < 0) throw ConfigError("num_sentences must be non-negative");
  if (noun_vocab < 1 || verb_vocab < 2) {
    throw ConfigError("synthetic vocabulary needs at least 1 noun and 2 verbs");
  }
  if (max_clauses < 1) throw ConfigError("max_clauses must be positive");
  for (double r : {modifier_rate, relative_rate, zero_fraction, place_rate, voice_rate}) {
    if (r < 0.0 || r > 1.0) throw ConfigError("synthetic rates must lie in [0, 1]");
  }
}

bool SyntheticConfig::Set(std::string_view key, std::string_view value) {
  try {
    if (key == "num_sentences") {
      num_sentences = ParseInt(value);
    } else if (key == "noun_vocab") {
      noun_vocab = ParseInt(value);
    } else if (key == "verb_vocab") {
      verb_vocab = ParseInt(value);
    } else if (key == "max_clauses") {
      max_clauses = ParseInt(value);
    } else if (key == "modifier_rate") {
      modifier_rate = ParseDouble(value);
    } else if (key == "relative_rate") {
      relative_rate = ParseDouble(value);
    } else if (key == "zero_fraction") {
      zero_fraction = ParseDouble(value);
    } else if (key == "place_rate") {
      place_rate = ParseDouble(value);
    } else if (key == "voice_rate") {
      voice_rate = ParseDouble(value);
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(std::stoull(std::string(value)));
    } else {
      return false;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value for synthetic setting '" + std::string(key) + "': " + e.what());
  }
  return true;
}

std::string SyntheticNoun(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%03d", i);
  return buf;
}

std::string SyntheticVerb(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "v%02d", i);
  return buf;
}

namespace {

struct VerbNode;

struct NounNode {
  int lemma = 0;
  std::string particle;
  int modifier = -1;  // lemma of an "A no" modifier
  std::unique_ptr<VerbNode> relative;
  int token = -1;
};

enum class VerbKind { kMain, kComplement, kRelative };

struct VerbNode {
  int lemma = 0;
  VerbKind kind = VerbKind::kMain;
  bool voice = false;
  std::vector<NounNode> nouns;  // linear order
  std::unique_ptr<VerbNode> complement;
  int token = -1;
  std::array<std::optional<int>, kNumArgCases> gold;
  int ga = -1, wo = -1, ni = -1;  // positions in `nouns`
};

class Generator {
 public:
  explicit Generator(const SyntheticConfig& c) : c_(c), rng_(c.seed) {
    std::vector<int> verbs(c.verb_vocab);
    for (int i = 0; i < c.verb_vocab; ++i) verbs[i] = i;
    std::shuffle(verbs.begin(), verbs.end(), rng_);
    control_.assign(c.verb_vocab, false);
    for (int i = 0; i < c.verb_vocab / 2; ++i) control_[verbs[i]] = true;
  }

  SyntheticCorpus Run() {
    SyntheticCorpus out;
    for (int i = 0; i < c_.verb_vocab; ++i) {
      if (control_[i]) out.control_verbs.insert(SyntheticVerb(i));
    }
    for (int i = 0; i < c_.num_sentences; ++i) {
      Sentence s = MakeSentence();
      out.stats.token_counts.push_back(s.num_tokens());
      out.stats.predicates += static_cast<long>(s.predicates().size());
      out.corpus.push_back(std::move(s));
    }
    out.stats.gold_args = gold_;
    out.stats.zero_args = zero_;
    return out;
  }

 private:
  bool Flip(double p) { return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng_); }
  int Noun() { return std::uniform_int_distribution<int>(0, c_.noun_vocab - 1)(rng_); }
  int Verb() { return std::uniform_int_distribution<int>(0, c_.verb_vocab - 1)(rng_); }

  // Pushes the realised zero fraction toward the target.
  double Steer(double base) const {
    if (c_.zero_fraction <= 0.0) return 0.0;
    const double realized = gold_ > 0 ? static_cast<double>(zero_) / gold_ : 0.0;
    return std::clamp(base + 100.0 * (c_.zero_fraction - realized), 0.0, 1.0);
  }

  NounNode MakeNoun(const std::string& particle, bool allow_relative) {
    NounNode n;
    n.lemma = Noun();
    n.particle = particle;
    if (Flip(c_.modifier_rate)) n.modifier = Noun();
    if (allow_relative && Flip(c_.relative_rate)) n.relative = MakeRelative();
    return n;
  }

  void AddArgs(VerbNode& v, bool ga, bool wo, bool ni, bool allow_relative) {
    if (Flip(c_.place_rate)) v.nouns.push_back(MakeNoun("de", false));
    if (ga) {
      v.ga = static_cast<int>(v.nouns.size());
      v.nouns.push_back(MakeNoun("ga", allow_relative));
    }
    if (ni) {
      v.ni = static_cast<int>(v.nouns.size());
      v.nouns.push_back(MakeNoun("ni", allow_relative));
    }
    if (wo) {
      v.wo = static_cast<int>(v.nouns.size());
      v.nouns.push_back(MakeNoun("wo", allow_relative));
    }
  }

  std::unique_ptr<VerbNode> MakeRelative() {
    auto r = std::make_unique<VerbNode>();
    r->lemma = Verb();
    r->kind = VerbKind::kRelative;
    r->voice = Flip(c_.voice_rate);
    const bool ga = Flip(0.5);
    AddArgs(*r, ga, !ga, Flip(0.3), false);
    return r;
  }

  Sentence MakeSentence() {
    const int depth = Flip(Steer(0.2))
                          ? c_.max_clauses
                          : std::uniform_int_distribution<int>(1, c_.max_clauses)(rng_);
    const bool topic = depth > 1 && Flip(Steer(0.5));
    // Argument pattern per spine verb, decided before building so that a
    // governor can be given a ni-argument when its complement needs one.
    std::vector<std::array<bool, 3>> pattern(depth);  // ga, wo, ni
    for (int i = 0; i < depth; ++i) {
      const bool ga = i == 0 || !Flip(Steer(0.5));
      pattern[i] = {ga, Flip(0.5), Flip(0.2)};
    }
    for (int i = 1; i < depth; ++i) {
      if (!pattern[i][0] && !pattern[i][1]) pattern[i - 1][2] = true;
    }
    auto main = std::make_unique<VerbNode>();
    VerbNode* v = main.get();
    for (int i = 0; i < depth; ++i) {
      v->lemma = Verb();
      v->kind = i == 0 ? VerbKind::kMain : VerbKind::kComplement;
      v->voice = Flip(c_.voice_rate);
      if (i == 0 && topic) v->nouns.push_back(MakeNoun("wa", false));
      AddArgs(*v, pattern[i][0], pattern[i][1], pattern[i][2], true);
      if (i + 1 < depth) {
        v->complement = std::make_unique<VerbNode>();
        v = v->complement.get();
      }
    }

    tokens_.clear();
    bunsetsus_.clear();
    verbs_.clear();
    EmitVerb(*main);
    const int topic_token = topic ? main->nouns.front().token : -1;
    Label(*main, nullptr, topic_token);

    std::sort(verbs_.begin(), verbs_.end(),
              [](const VerbNode* a, const VerbNode* b) { return a->token < b->token; });
    std::vector<PredicateInstance> preds;
    for (const VerbNode* vn : verbs_) {
      PredicateInstance p;
      p.pred_token = vn->token;
      if (vn->voice) p.voice_suffixes = {"reru"};
      p.gold = vn->gold;
      preds.push_back(std::move(p));
    }
    Sentence s(tokens_, bunsetsus_, std::move(preds));
    for (const PredicateInstance& p : s.predicates()) {
      for (Case c : kArgCases) {
        if (auto g = p.GoldFiller(c)) {
          ++gold_;
          if (DependencyDistance(s, p.pred_token, *g) >= 2) ++zero_;
        }
      }
    }
    return s;
  }

  int AddToken(const std::string& lemma, const std::string& pos, const std::string& conj,
               int bunsetsu) {
    Token t;
    t.index = static_cast<int>(tokens_.size());
    t.surface = lemma;
    t.lemma = lemma;
    t.pos = pos;
    t.conj_form = conj;
    t.bunsetsu_id = bunsetsu;
    tokens_.push_back(t);
    return t.index;
  }

  int OpenBunsetsu() {
    Bunsetsu b;
    b.id = static_cast<int>(bunsetsus_.size());
    b.first_token = static_cast<int>(tokens_.size());
    bunsetsus_.push_back(b);
    return b.id;
  }

  void CloseBunsetsu(int id, int head) {
    bunsetsus_[id].last_token = static_cast<int>(tokens_.size()) - 1;
    bunsetsus_[id].head_token = head;
  }

  int EmitNoun(NounNode& n) {
    std::vector<int> deps;
    if (n.modifier >= 0) {
      const int b = OpenBunsetsu();
      const int head = AddToken(SyntheticNoun(n.modifier), "NOUN", "", b);
      AddToken("no", "PART", "", b);
      CloseBunsetsu(b, head);
      deps.push_back(b);
    }
    if (n.relative) deps.push_back(EmitVerb(*n.relative));
    const int b = OpenBunsetsu();
    n.token = AddToken(SyntheticNoun(n.lemma), "NOUN", "", b);
    AddToken(n.particle, "PART", "", b);
    CloseBunsetsu(b, n.token);
    for (int d : deps) bunsetsus_[d].dep_head = b;
    return b;
  }

  int EmitVerb(VerbNode& v) {
    std::vector<int> deps;
    for (NounNode& n : v.nouns) deps.push_back(EmitNoun(n));
    if (v.complement) deps.push_back(EmitVerb(*v.complement));
    const int b = OpenBunsetsu();
    const char* conj =
        v.kind == VerbKind::kMain ? "end" : v.kind == VerbKind::kComplement ? "cont" : "adn";
    v.token = AddToken(SyntheticVerb(v.lemma), "VERB", conj, b);
    if (v.voice) AddToken("reru", "AUX", "", b);
    CloseBunsetsu(b, v.token);
    for (int d : deps) bunsetsus_[d].dep_head = b;
    verbs_.push_back(&v);
    return b;
  }

  void Label(VerbNode& v, const VerbNode* governor, int topic_token) {
    auto overt = [&](int pos) -> std::optional<int> {
      if (pos < 0) return std::nullopt;
      return v.nouns[pos].token;
    };
    v.gold[CaseIndex(Case::kNom)] = overt(v.ga);
    v.gold[CaseIndex(Case::kAcc)] = overt(v.wo);
    v.gold[CaseIndex(Case::kDat)] = overt(v.ni);
    if (v.ga < 0 && governor) {
      if (control_[governor->lemma]) {
        v.gold[CaseIndex(Case::kNom)] = v.wo >= 0 ? governor->gold[CaseIndex(Case::kNom)]
                                                  : governor->gold[CaseIndex(Case::kDat)];
      } else if (topic_token >= 0) {
        v.gold[CaseIndex(Case::kNom)] = topic_token;
      }
    }
    for (NounNode& n : v.nouns) {
      if (!n.relative) continue;
      VerbNode& r = *n.relative;
      Label(r, nullptr, -1);
      if (r.wo >= 0) r.gold[CaseIndex(Case::kNom)] = n.token;
      if (r.ga >= 0) r.gold[CaseIndex(Case::kAcc)] = n.token;
    }
    if (v.complement) Label(*v.complement, &v, topic_token);
  }

  const SyntheticConfig& c_;
  std::mt19937_64 rng_;
  std::vector<bool> control_;
  long gold_ = 0;
  long zero_ = 0;
  std::vector<Token> tokens_;
  std::vector<Bunsetsu> bunsetsus_;
  std::vector<VerbNode*> verbs_;
};

}  // namespace

SyntheticCorpus GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  return Generator(config).Run();
}

}  // namespace pasforge
