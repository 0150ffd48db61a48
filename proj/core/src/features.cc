#include "pasforge/features.h"

#include <algorithm>
#include <stdexcept>

#include "pasforge/errors.h"
#include "pasforge/util.h"
#include "pasforge/vocab.h"

namespace pasforge {

std::string_view TemplateGroupName(TemplateGroup g) {
  switch (g) {
    case TemplateGroup::kWord: return "word";
    case TemplateGroup::kPath: return "path";
    case TemplateGroup::kCases: return "cases";
  }
  return "?";
}

std::optional<TemplateGroup> TemplateGroupFromName(std::string_view name) {
  if (!name.empty() && name.front() == '-') name.remove_prefix(1);
  if (name == "word") return TemplateGroup::kWord;
  if (name == "path") return TemplateGroup::kPath;
  if (name == "cases") return TemplateGroup::kCases;
  return std::nullopt;
}

std::string TemplateSet::RemovedList() const {
  std::vector<std::string> names;
  for (TemplateGroup g : removed) names.emplace_back(TemplateGroupName(g));
  return Join(names, ",");
}

std::set<TemplateGroup> TemplateSet::ParseRemoved(std::string_view list) {
  std::set<TemplateGroup> out;
  if (Trim(list).empty()) return out;
  for (const std::string& part : Split(list, ',')) {
    std::string_view name = Trim(part);
    if (name.empty()) continue;
    auto g = TemplateGroupFromName(name);
    if (!g) throw ConfigError("unknown feature template group '" + std::string(name) + "'");
    out.insert(*g);
  }
  return out;
}

PathSequence TruncatePath(std::vector<PathItem> items) {
  PathSequence seq;
  if (static_cast<int>(items.size()) <= kMaxPathItems) {
    seq.items = std::move(items);
    return seq;
  }
  seq.items.reserve(kMaxPathItems);
  for (int i = 0; i < kPathKeepEachSide; ++i) seq.items.push_back(std::move(items[i]));
  seq.items.push_back({std::string(Vocabulary::kPathGap), std::string(Vocabulary::kPathGap),
                       Direction::kGap});
  for (std::size_t i = items.size() - kPathKeepEachSide; i < items.size(); ++i) {
    seq.items.push_back(std::move(items[i]));
  }
  return seq;
}

namespace {

// Token standing for step `i` of a bunsetsu path between p and a.
int PathToken(const Sentence& s, const std::vector<PathStep>& steps, std::size_t i, int p,
              int a) {
  if (i + 1 == steps.size()) return a;
  if (i == 0) return p;
  return s.bunsetsu(steps[i].bunsetsu).head_token;
}

}  // namespace

PathSequence ExtractPathSequence(const Sentence& s, const PredicateInstance& pred, int a) {
  const int p = pred.pred_token;
  std::vector<PathStep> steps = BunsetsuPath(s, s.token(p).bunsetsu_id, s.token(a).bunsetsu_id);
  std::vector<PathItem> items;
  items.reserve(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Token& t = s.token(PathToken(s, steps, i, p, a));
    items.push_back({t.pos, t.lemma, steps[i].direction});
  }
  return TruncatePath(std::move(items));
}

std::vector<std::string> OtherDependentsCaseMarkers(const Sentence& s,
                                                    const PredicateInstance& pred, int a,
                                                    const TemplateSet& templates) {
  const int pred_b = s.token(pred.pred_token).bunsetsu_id;
  const int cand_b = s.token(a).bunsetsu_id;
  std::set<std::string> markers;
  for (int dep : s.dependents(pred_b)) {
    if (dep == cand_b) continue;
    const Bunsetsu& b = s.bunsetsu(dep);
    for (int t = b.first_token; t <= b.last_token; ++t) {
      if (templates.IsParticle(s.token(t).pos)) markers.insert("othercase=" + s.token(t).lemma);
    }
  }
  return {markers.begin(), markers.end()};
}

std::string TokenDistanceBucket(int distance) {
  if (distance <= 5) return std::to_string(distance);
  if (distance <= 10) return "6-10";
  return ">10";
}

std::string DependencyDistanceBucket(int distance) {
  if (distance <= 4) return std::to_string(distance);
  return ">=5";
}

std::vector<std::string> ExtractBinaryFeatures(const Sentence& s, const PredicateInstance& pred,
                                               int a, const TemplateSet& templates) {
  const int p = pred.pred_token;
  const Token& pt = s.token(p);
  const Token& at = s.token(a);
  const Bunsetsu& ab = s.bunsetsu_of(a);
  const bool word = templates.Has(TemplateGroup::kWord);
  std::vector<std::string> f;
  f.reserve(32);

  // Predicate.
  if (word) {
    f.push_back("pred.surface=" + pt.surface);
    f.push_back("pred.lemma=" + pt.lemma);
    if (pred.nominal_form) f.push_back("pred.nominal=" + *pred.nominal_form);
  }
  f.push_back("pred.pos=" + pt.pos);
  f.push_back("pred.conj=" + (pt.conj_form.empty() ? std::string("_") : pt.conj_form));
  for (const std::string& v : pred.voice_suffixes) f.push_back("pred.voice=" + v);

  // Argument candidate.
  if (word) {
    f.push_back("arg.surface=" + at.surface);
    f.push_back("arg.lemma=" + at.lemma);
  }
  f.push_back("arg.pos=" + at.pos);
  f.push_back("arg.ne=" + at.ne_tag);
  f.push_back(std::string("arg.is_head=") + (ab.head_token == a ? "true" : "false"));
  std::set<std::string> particles;
  for (int t = ab.first_token; t <= ab.last_token; ++t) {
    if (templates.IsParticle(s.token(t).pos)) particles.insert(s.token(t).lemma);
  }
  for (const std::string& particle : particles) f.push_back("arg.particle=" + particle);
  if (a + 1 < s.num_tokens()) {
    const Token& right = s.token(a + 1);
    if (word) f.push_back("arg.right_lemma=" + right.lemma);
    f.push_back("arg.right_pos=" + right.pos);
  } else {
    if (word) f.push_back("arg.right_lemma=EOS");
    f.push_back("arg.right_pos=EOS");
  }

  // Pair.
  std::vector<PathStep> steps = BunsetsuPath(s, pt.bunsetsu_id, at.bunsetsu_id);
  const int dep_dist = static_cast<int>(steps.size()) - 1;
  f.push_back(std::string("pair.a_precedes_p=") + (a < p ? "true" : "false"));
  f.push_back(std::string("pair.same_bunsetsu=") + (dep_dist == 0 ? "true" : "false"));
  f.push_back("pair.tok_dist=" + TokenDistanceBucket(std::abs(a - p)));
  f.push_back("pair.dep_dist=" + DependencyDistanceBucket(dep_dist));
  if (templates.Has(TemplateGroup::kPath) &&
      static_cast<int>(steps.size()) <= kMaxNaivePathBunsetsus) {
    std::string path = "pair.path=";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i > 0) path += '|';
      path += s.token(PathToken(s, steps, i, p, a)).pos;
      path += ':';
      path += DirectionName(steps[i].direction);
    }
    f.push_back(std::move(path));
  }

  if (templates.Has(TemplateGroup::kCases)) {
    for (std::string& m : OtherDependentsCaseMarkers(s, pred, a, templates)) {
      f.push_back(std::move(m));
    }
  }
  return f;
}

FeatureIndex::FeatureIndex(std::vector<std::string> features, int min_count)
    : features_(std::move(features)), min_count_(min_count) {
  std::sort(features_.begin(), features_.end());
  features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
  for (int i = 0; i < size(); ++i) ids_.emplace(features_[i], i);
}

std::optional<int> FeatureIndex::Find(std::string_view feature) const {
  auto it = ids_.find(feature);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string FeatureIndex::Serialize() const {
  std::string out;
  for (int i = 0; i < size(); ++i) {
    out += features_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

FeatureIndex FeatureIndex::Deserialize(std::string_view text) {
  std::vector<std::string> features;
  int line_no = 0;
  for (const std::string& line : Split(text, '\n')) {
    if (line.empty()) continue;
    ++line_no;
    std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw ParseError("<feature-index>", line_no, 1, "expected feature<TAB>id");
    }
    int id = ParseInt(std::string_view(line).substr(tab + 1));
    if (id != static_cast<int>(features.size())) {
      throw ParseError("<feature-index>", line_no, static_cast<int>(tab) + 2,
                       "feature ids must be contiguous and sorted");
    }
    features.push_back(line.substr(0, tab));
  }
  if (!std::is_sorted(features.begin(), features.end())) {
    throw ValidationError("feature index lines are not in sorted order");
  }
  return FeatureIndex(std::move(features), 1);
}

std::uint64_t FeatureIndex::Hash() const { return Fnv1a64(Serialize()); }

std::map<std::string, int> CountFeatures(const Corpus& corpus, const TemplateSet& templates) {
  std::map<std::string, int> counts;
  for (const Sentence& s : corpus) {
    for (const PredicateInstance& pred : s.predicates()) {
      for (int a = 0; a < s.num_tokens(); ++a) {
        if (a == pred.pred_token) continue;
        std::vector<std::string> f = ExtractBinaryFeatures(s, pred, a, templates);
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end()), f.end());
        for (std::string& name : f) ++counts[std::move(name)];
      }
    }
  }
  return counts;
}

FeatureIndex BuildFeatureIndex(const Corpus& corpus, const TemplateSet& templates,
                               int min_count) {
  if (corpus.empty()) throw std::invalid_argument("cannot build a feature index from an empty corpus");
  std::vector<std::string> kept;
  for (const auto& [name, count] : CountFeatures(corpus, templates)) {
    if (count >= min_count) kept.push_back(name);
  }
  return FeatureIndex(std::move(kept), min_count);
}

BinaryFeatureVector Vectorize(const std::vector<std::string>& features,
                              const FeatureIndex& index) {
  BinaryFeatureVector v;
  v.dimension = index.size();
  for (const std::string& name : features) {
    if (auto id = index.Find(name)) v.indices.push_back(*id);
  }
  std::sort(v.indices.begin(), v.indices.end());
  v.indices.erase(std::unique(v.indices.begin(), v.indices.end()), v.indices.end());
  return v;
}

}  // namespace pasforge
