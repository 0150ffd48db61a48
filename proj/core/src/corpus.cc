#include "pasforge/corpus.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <string>

#include "pasforge/errors.h"

namespace pasforge {

std::string_view CaseName(Case c) {
  switch (c) {
    case Case::kNom: return "NOM";
    case Case::kAcc: return "ACC";
    case Case::kDat: return "DAT";
    case Case::kNone: return "NONE";
  }
  return "?";
}

std::optional<Case> CaseFromName(std::string_view name) {
  if (name == "NOM") return Case::kNom;
  if (name == "ACC") return Case::kAcc;
  if (name == "DAT") return Case::kDat;
  if (name == "NONE") return Case::kNone;
  return std::nullopt;
}

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kUp: return "UP";
    case Direction::kDown: return "DOWN";
    case Direction::kEnd: return "END";
    case Direction::kGap: return "GAP";
  }
  return "?";
}

Sentence::Sentence(std::vector<Token> tokens, std::vector<Bunsetsu> bunsetsus,
                   std::vector<PredicateInstance> predicates)
    : tokens_(std::move(tokens)),
      bunsetsus_(std::move(bunsetsus)),
      predicates_(std::move(predicates)) {
  Validate();
}

void Sentence::Validate() {
  const int n = num_tokens();
  const int nb = num_bunsetsus();
  if (n == 0) throw ValidationError("sentence has no tokens");
  if (nb == 0) throw ValidationError("sentence has no bunsetsu records");

  for (int i = 0; i < n; ++i) {
    if (tokens_[i].index != i) {
      throw ValidationError("token indices must be contiguous from 0; found " +
                            std::to_string(tokens_[i].index) + " at position " +
                            std::to_string(i));
    }
  }

  std::vector<int> owner(n, -1);
  for (int b = 0; b < nb; ++b) {
    const Bunsetsu& bs = bunsetsus_[b];
    if (bs.id != b) {
      throw ValidationError("bunsetsu ids must be contiguous from 0; found " +
                            std::to_string(bs.id) + " at position " + std::to_string(b));
    }
    if (bs.first_token < 0 || bs.last_token >= n || bs.first_token > bs.last_token) {
      throw ValidationError("bunsetsu " + std::to_string(b) + " has invalid token span [" +
                            std::to_string(bs.first_token) + ", " +
                            std::to_string(bs.last_token) + "]");
    }
    if (bs.head_token < bs.first_token || bs.head_token > bs.last_token) {
      throw ValidationError("bunsetsu " + std::to_string(b) + " head token " +
                            std::to_string(bs.head_token) + " lies outside its span");
    }
    for (int t = bs.first_token; t <= bs.last_token; ++t) {
      if (owner[t] != -1) {
        throw ValidationError("token " + std::to_string(t) + " is covered by bunsetsu " +
                              std::to_string(owner[t]) + " and " + std::to_string(b));
      }
      owner[t] = b;
    }
    if (bs.dep_head != Bunsetsu::kRoot && (bs.dep_head < 0 || bs.dep_head >= nb)) {
      throw ValidationError("bunsetsu " + std::to_string(b) + " depends on missing bunsetsu " +
                            std::to_string(bs.dep_head));
    }
    if (bs.dep_head == b) {
      throw ValidationError("bunsetsu " + std::to_string(b) + " depends on itself");
    }
  }
  for (int t = 0; t < n; ++t) {
    if (owner[t] == -1) {
      throw ValidationError("token " + std::to_string(t) + " is not covered by any bunsetsu");
    }
    if (tokens_[t].bunsetsu_id != owner[t]) {
      throw ValidationError("token " + std::to_string(t) + " claims bunsetsu " +
                            std::to_string(tokens_[t].bunsetsu_id) + " but lies in bunsetsu " +
                            std::to_string(owner[t]));
    }
  }

  // Cycle detection: walk up from every node, colouring the current walk.
  std::vector<int> state(nb, 0);  // 0 unvisited, 1 on current walk, 2 done
  for (int start = 0; start < nb; ++start) {
    std::vector<int> walk;
    int cur = start;
    while (cur != Bunsetsu::kRoot && state[cur] == 0) {
      state[cur] = 1;
      walk.push_back(cur);
      cur = bunsetsus_[cur].dep_head;
    }
    if (cur != Bunsetsu::kRoot && state[cur] == 1) {
      auto it = std::find(walk.begin(), walk.end(), cur);
      std::string cycle;
      for (; it != walk.end(); ++it) cycle += std::to_string(*it) + " -> ";
      cycle += std::to_string(cur);
      throw ValidationError("bunsetsu dependency cycle: " + cycle);
    }
    for (int w : walk) state[w] = 2;
  }

  int roots = 0;
  for (int b = 0; b < nb; ++b) {
    if (bunsetsus_[b].dep_head == Bunsetsu::kRoot) {
      root_ = b;
      ++roots;
    }
  }
  if (roots != 1) {
    throw ValidationError("bunsetsu tree must have exactly one root, found " +
                          std::to_string(roots));
  }

  dependents_.assign(nb, {});
  for (int b = 0; b < nb; ++b) {
    if (bunsetsus_[b].dep_head != Bunsetsu::kRoot) {
      dependents_[bunsetsus_[b].dep_head].push_back(b);
    }
  }
  depth_.assign(nb, -1);
  for (int b = 0; b < nb; ++b) {
    int d = 0;
    for (int cur = b; bunsetsus_[cur].dep_head != Bunsetsu::kRoot;
         cur = bunsetsus_[cur].dep_head) {
      ++d;
    }
    depth_[b] = d;
  }

  std::vector<bool> seen_pred(n, false);
  for (const PredicateInstance& p : predicates_) {
    if (p.pred_token < 0 || p.pred_token >= n) {
      throw ValidationError("predicate token " + std::to_string(p.pred_token) +
                            " is out of range");
    }
    if (seen_pred[p.pred_token]) {
      throw ValidationError("duplicate predicate record for token " +
                            std::to_string(p.pred_token));
    }
    seen_pred[p.pred_token] = true;
    for (const std::string& v : p.voice_suffixes) {
      if (std::find(kVoiceSuffixes.begin(), kVoiceSuffixes.end(), v) == kVoiceSuffixes.end()) {
        throw ValidationError("unknown voice suffix '" + v + "'");
      }
    }
    for (Case c : kArgCases) {
      std::optional<int> g = p.GoldFiller(c);
      if (!g) continue;
      if (*g < 0 || *g >= n) {
        throw ValidationError(std::string(CaseName(c)) + " filler " + std::to_string(*g) +
                              " of predicate " + std::to_string(p.pred_token) +
                              " is out of range");
      }
      if (*g == p.pred_token) {
        throw ValidationError(std::string(CaseName(c)) + " filler of predicate " +
                              std::to_string(p.pred_token) + " is the predicate itself");
      }
    }
  }
}

std::vector<PathStep> BunsetsuPath(const Sentence& s, int from_b, int to_b) {
  std::vector<int> up_part;
  std::vector<int> down_part;
  int x = from_b;
  int y = to_b;
  while (s.depth(x) > s.depth(y)) {
    up_part.push_back(x);
    x = s.bunsetsu(x).dep_head;
  }
  while (s.depth(y) > s.depth(x)) {
    down_part.push_back(y);
    y = s.bunsetsu(y).dep_head;
  }
  while (x != y) {
    up_part.push_back(x);
    down_part.push_back(y);
    x = s.bunsetsu(x).dep_head;
    y = s.bunsetsu(y).dep_head;
  }
  std::vector<PathStep> path;
  path.reserve(up_part.size() + down_part.size() + 1);
  for (int b : up_part) path.push_back({b, Direction::kUp});
  path.push_back({x, Direction::kDown});
  for (auto it = down_part.rbegin(); it != down_part.rend(); ++it) {
    path.push_back({*it, Direction::kDown});
  }
  path.back().direction = Direction::kEnd;
  return path;
}

int DependencyDistance(const Sentence& s, int p, int a) {
  return static_cast<int>(
             BunsetsuPath(s, s.token(p).bunsetsu_id, s.token(a).bunsetsu_id).size()) -
         1;
}

Case GoldLabelOf(const PredicateInstance& pred, int a) {
  Case label = Case::kNone;
  int matches = 0;
  for (Case c : kArgCases) {
    if (pred.GoldFiller(c) == a) {
      if (matches == 0) label = c;
      ++matches;
    }
  }
  if (matches > 1) {
    spdlog::warn("token {} fills {} slots of predicate {}; labelling it {}", a, matches,
                 pred.pred_token, CaseName(label));
  }
  return label;
}

}  // namespace pasforge
