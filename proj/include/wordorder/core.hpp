#pragma once

// Domain types for the Czech word-order task and the constraint-violation
// engine shared by every learner: 27 discourse-function input patterns, six
// candidate word orders, and twelve binary alignment constraints evaluated
// to ternary attribute values (+1 comply / 0 vacuous / -1 violate).

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wordorder {

// ---------------------------------------------------------------------------
// Discourse marks and input patterns

enum class DiscourseMark : std::uint8_t {
  Topic = 0,             // t: contextually bound (old information)
  ContrastiveTopic = 1,  // c: contrastive contextually bound
  Focus = 2,             // f: contextually non-bound (new); default annotation
};

inline constexpr int kMarkCount = 3;
inline constexpr int kPatternCount = 27;

inline char mark_letter(DiscourseMark m) {
  static constexpr char kLetters[] = {'t', 'c', 'f'};
  return kLetters[static_cast<int>(m)];
}

inline DiscourseMark mark_from_letter(char c) {
  switch (c) {
    case 't': return DiscourseMark::Topic;
    case 'c': return DiscourseMark::ContrastiveTopic;
    case 'f': return DiscourseMark::Focus;
    default: throw std::invalid_argument(std::string("unknown discourse mark '") + c + "'");
  }
}

enum class Role : std::uint8_t { Subject = 0, Verb = 1, Object = 2 };

// The grammar's input x: one mark per grammatical element.
struct InputPattern {
  std::array<DiscourseMark, 3> marks{};  // indexed by Role

  constexpr DiscourseMark subject() const { return marks[0]; }
  constexpr DiscourseMark verb() const { return marks[1]; }
  constexpr DiscourseMark object() const { return marks[2]; }
  constexpr DiscourseMark mark_of(Role r) const { return marks[static_cast<int>(r)]; }

  // Lexicographic index with t < c < f, subject most significant. This is
  // also the canonical enumeration order for all per-pattern tables.
  constexpr int index() const {
    return static_cast<int>(marks[0]) * 9 + static_cast<int>(marks[1]) * 3 +
           static_cast<int>(marks[2]);
  }

  static constexpr InputPattern from_index(int i) {
    InputPattern p;
    p.marks[0] = static_cast<DiscourseMark>((i / 9) % 3);
    p.marks[1] = static_cast<DiscourseMark>((i / 3) % 3);
    p.marks[2] = static_cast<DiscourseMark>(i % 3);
    return p;
  }

  friend constexpr bool operator==(InputPattern a, InputPattern b) {
    return a.marks == b.marks;
  }
  friend constexpr bool operator<(InputPattern a, InputPattern b) {
    return a.index() < b.index();
  }
};

inline InputPattern make_pattern(DiscourseMark s, DiscourseMark v, DiscourseMark o) {
  return InputPattern{{s, v, o}};
}

// "t f f" style, matching the sentence file format.
inline std::string pattern_to_string(InputPattern p) {
  std::string s;
  s += mark_letter(p.subject());
  s += ' ';
  s += mark_letter(p.verb());
  s += ' ';
  s += mark_letter(p.object());
  return s;
}

// Compact "tff" form for CSV cells and report keys.
inline std::string pattern_key(InputPattern p) {
  return {mark_letter(p.subject()), mark_letter(p.verb()), mark_letter(p.object())};
}

// ---------------------------------------------------------------------------
// Word orders

enum class WordOrder : std::uint8_t { SVO = 0, OVS = 1, VSO = 2, SOV = 3, VOS = 4, OSV = 5 };

inline constexpr int kOrderCount = 6;

inline constexpr std::array<WordOrder, 6> kAllOrders = {
    WordOrder::SVO, WordOrder::OVS, WordOrder::VSO,
    WordOrder::SOV, WordOrder::VOS, WordOrder::OSV};

// role_at(order, position): which element sits in sentence position 0/1/2.
inline constexpr Role role_at(WordOrder o, int position) {
  constexpr Role S = Role::Subject, V = Role::Verb, O = Role::Object;
  constexpr Role kTable[6][3] = {
      {S, V, O}, {O, V, S}, {V, S, O}, {S, O, V}, {V, O, S}, {O, S, V}};
  return kTable[static_cast<int>(o)][position];
}

inline constexpr int position_of(WordOrder o, Role r) {
  for (int p = 0; p < 3; ++p) {
    if (role_at(o, p) == r) return p;
  }
  return -1;  // unreachable
}

inline const char* order_name(WordOrder o) {
  static constexpr const char* kNames[] = {"SVO", "OVS", "VSO", "SOV", "VOS", "OSV"};
  return kNames[static_cast<int>(o)];
}

inline WordOrder order_from_string(const std::string& s) {
  for (WordOrder o : kAllOrders) {
    if (s == order_name(o)) return o;
  }
  throw std::invalid_argument("unknown word order '" + s + "'");
}

// ---------------------------------------------------------------------------
// Constraints

enum class AlignTarget : std::uint8_t {
  Subject = 0, Verb = 1, Object = 2, Topic = 3, ContrastiveTopic = 4, Focus = 5,
};

enum class Edge : std::uint8_t { Left = 0, Right = 1 };

inline constexpr int kConstraintCount = 12;

// A single edge-most alignment constraint: the targeted element (grammatical
// role or information-structure mark) wants to sit at the given edge.
struct Constraint {
  AlignTarget target{};
  Edge edge{};

  constexpr int index() const {
    return static_cast<int>(target) * 2 + static_cast<int>(edge);
  }
  constexpr bool grammatical() const {
    return static_cast<int>(target) < 3;
  }
  static constexpr Constraint from_index(int i) {
    return Constraint{static_cast<AlignTarget>(i / 2), static_cast<Edge>(i % 2)};
  }
};

// Canonical index order: S-L, S-R, V-L, V-R, O-L, O-R, T-L, T-R, C-L, C-R,
// F-L, F-R. All weight vectors, violation vectors, and file formats use it.
inline const char* constraint_name(int index) {
  static constexpr const char* kNames[] = {
      "subject-left", "subject-right", "verb-left",   "verb-right",
      "object-left",  "object-right",  "topic-left",  "topic-right",
      "ctopic-left",  "ctopic-right",  "focus-left",  "focus-right"};
  return kNames[index];
}

inline const char* constraint_display_name(int index) {
  static constexpr const char* kNames[] = {
      "Subject Left", "Subject Right", "Verb Left",   "Verb Right",
      "Object Left",  "Object Right",  "Topic Left",  "Topic Right",
      "C-Topic Left", "C-Topic Right", "Focus Left",  "Focus Right"};
  return kNames[index];
}

inline int constraint_from_name(const std::string& name) {
  for (int i = 0; i < kConstraintCount; ++i) {
    if (name == constraint_name(i)) return i;
  }
  throw std::invalid_argument("unknown constraint '" + name + "'");
}

// ---------------------------------------------------------------------------
// Violation vectors and weights

// f(x, y): one ternary attribute value per constraint.
using ViolationVector = std::array<std::int8_t, kConstraintCount>;

// w: one real weight per constraint.
using WeightVector = std::array<double, kConstraintCount>;

// Strict constraint hierarchy: constraint indices, highest ranked first.
using Ranking = std::array<std::uint8_t, kConstraintCount>;

// Evaluates all twelve constraints for an (input, word order) pair.
//   Grammatical (role, edge):   +1 if the role sits at that edge, else -1.
//   Information (mark, edge):   0 if no element carries the mark; +1 if the
//     element at that edge carries it; -1 otherwise. One marked element at
//     the edge is enough even when other elements carry the same mark.
constexpr ViolationVector evaluate_constraints(InputPattern input, WordOrder order) {
  ViolationVector v{};
  for (int r = 0; r < 3; ++r) {
    const int pos = position_of(order, static_cast<Role>(r));
    v[r * 2 + 0] = (pos == 0) ? +1 : -1;
    v[r * 2 + 1] = (pos == 2) ? +1 : -1;
  }
  for (int m = 0; m < kMarkCount; ++m) {
    const auto mark = static_cast<DiscourseMark>(m);
    const bool present = input.marks[0] == mark || input.marks[1] == mark ||
                         input.marks[2] == mark;
    const int base = 6 + m * 2;
    if (!present) {
      v[base] = 0;
      v[base + 1] = 0;
      continue;
    }
    const DiscourseMark left = input.mark_of(role_at(order, 0));
    const DiscourseMark right = input.mark_of(role_at(order, 2));
    v[base] = (left == mark) ? +1 : -1;
    v[base + 1] = (right == mark) ? +1 : -1;
  }
  return v;
}

// Harmony of a candidate: dot product of attribute values and weights.
inline double harmony(const WeightVector& weights, const ViolationVector& violations) {
  double h = 0.0;
  for (int i = 0; i < kConstraintCount; ++i) {
    h += weights[i] * static_cast<double>(violations[i]);
  }
  return h;
}

inline double harmony(const WeightVector& weights, InputPattern input, WordOrder order) {
  return harmony(weights, evaluate_constraints(input, order));
}

// ---------------------------------------------------------------------------
// OT evaluation

enum class OtOrdering { AWins, BWins, Tie };

// Walks the hierarchy top-down; at the first constraint where the vectors
// differ, the candidate with the larger attribute value wins.
inline OtOrdering ot_compare(const Ranking& ranking, const ViolationVector& a,
                             const ViolationVector& b) {
  for (int pos = 0; pos < kConstraintCount; ++pos) {
    const int c = ranking[pos];
    if (a[c] != b[c]) return a[c] > b[c] ? OtOrdering::AWins : OtOrdering::BWins;
  }
  return OtOrdering::Tie;
}

// Winner over the six candidate orders; OT ties break toward the lower
// canonical order index so prediction is deterministic.
inline WordOrder ot_predict(const Ranking& ranking, InputPattern input) {
  WordOrder best = WordOrder::SVO;
  ViolationVector best_v = evaluate_constraints(input, best);
  for (int i = 1; i < kOrderCount; ++i) {
    const WordOrder cand = static_cast<WordOrder>(i);
    const ViolationVector v = evaluate_constraints(input, cand);
    if (ot_compare(ranking, v, best_v) == OtOrdering::AWins) {
      best = cand;
      best_v = v;
    }
  }
  return best;
}

// Constraint indices sorted by weight, descending; ties break toward the
// lower canonical index.
inline Ranking ranking_from_weights(const WeightVector& weights) {
  Ranking r{};
  for (int i = 0; i < kConstraintCount; ++i) r[i] = static_cast<std::uint8_t>(i);
  for (int i = 1; i < kConstraintCount; ++i) {  // insertion sort, stable
    const std::uint8_t key = r[i];
    int j = i - 1;
    while (j >= 0 && weights[r[j]] < weights[key]) {
      r[j + 1] = r[j];
      --j;
    }
    r[j + 1] = key;
  }
  return r;
}

// Weights 2^11 .. 2^0 down the hierarchy: far enough apart that no set of
// lower constraints can outvote a higher one, so HG argmax reproduces the
// strict-ranking winner exactly.
inline WeightVector powers_of_two_weights(const Ranking& ranking) {
  WeightVector w{};
  for (int pos = 0; pos < kConstraintCount; ++pos) {
    w[ranking[pos]] = static_cast<double>(1 << (kConstraintCount - 1 - pos));
  }
  return w;
}

// Argmax-by-harmony over the six orders; ties break toward the lower
// canonical order index.
inline WordOrder hg_predict(const WeightVector& weights, InputPattern input) {
  WordOrder best = WordOrder::SVO;
  double best_h = harmony(weights, input, best);
  for (int i = 1; i < kOrderCount; ++i) {
    const WordOrder cand = static_cast<WordOrder>(i);
    const double h = harmony(weights, input, cand);
    if (h > best_h) {
      best = cand;
      best_h = h;
    }
  }
  return best;
}

inline bool is_permutation_of_constraints(const Ranking& r) {
  std::array<bool, kConstraintCount> seen{};
  for (auto c : r) {
    if (c >= kConstraintCount || seen[c]) return false;
    seen[c] = true;
  }
  return true;
}

}  // namespace wordorder
