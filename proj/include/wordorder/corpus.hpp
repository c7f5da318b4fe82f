#pragma once

// Training-data machinery: the published 27x6 count table for the 2955-
// sentence PDT extract, deterministic corpus regeneration and resampling,
// splits, the two reference predictors (always-SVO and per-pattern modal
// order), and the sentence file format.

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wordorder/core.hpp"
#include "wordorder/rng.hpp"

namespace wordorder {

// One annotated training pair (x_i, y_i).
struct Sentence {
  InputPattern input;
  WordOrder observed;

  friend bool operator==(const Sentence& a, const Sentence& b) {
    return a.input == b.input && a.observed == b.observed;
  }
};

// Sentence order is significant: online learners consume it as-is, so a
// corpus records how it was produced.
struct Corpus {
  std::vector<Sentence> sentences;
  std::string provenance;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

// Joint counts over (input pattern, word order) cells.
struct PatternCounts {
  std::array<std::array<int, kOrderCount>, kPatternCount> counts{};

  int& at(InputPattern p, WordOrder o) {
    return counts[p.index()][static_cast<int>(o)];
  }
  int at(InputPattern p, WordOrder o) const {
    return counts[p.index()][static_cast<int>(o)];
  }
  int row_sum(int pattern_index) const {
    int s = 0;
    for (int c : counts[pattern_index]) s += c;
    return s;
  }
  int col_sum(WordOrder o) const {
    int s = 0;
    for (const auto& row : counts) s += row[static_cast<int>(o)];
    return s;
  }
  int total() const {
    int s = 0;
    for (int p = 0; p < kPatternCount; ++p) s += row_sum(p);
    return s;
  }
};

// The full training distribution of the 2955 simple transitive PDT
// sentences, keyed by (subject, verb, object) marks in t<c<f order and the
// canonical word-order columns SVO,OVS,VSO,SOV,VOS,OSV.
inline const PatternCounts& table2_counts() {
  static const PatternCounts counts = [] {
    PatternCounts pc;
    static constexpr int kCells[kPatternCount][kOrderCount] = {
        // S=t
        {23, 4, 4, 3, 3, 3},        // t t t
        {0, 1, 0, 0, 0, 2},         // t t c
        {22, 0, 11, 0, 1, 0},       // t t f
        {0, 0, 0, 0, 0, 0},         // t c t
        {0, 0, 0, 0, 0, 0},         // t c c
        {0, 0, 0, 0, 0, 0},         // t c f
        {97, 26, 28, 12, 80, 32},   // t f t
        {2, 43, 0, 0, 1, 20},       // t f c
        {519, 7, 145, 17, 28, 4},   // t f f
        // S=c
        {7, 0, 0, 0, 3, 0},         // c t t
        {0, 0, 0, 0, 1, 0},         // c t c
        {26, 0, 1, 0, 3, 0},        // c t f
        {0, 0, 0, 0, 0, 0},         // c c t
        {0, 0, 0, 0, 0, 0},         // c c c
        {0, 0, 0, 0, 0, 0},         // c c f
        {111, 0, 2, 0, 76, 4},      // c f t
        {0, 0, 0, 0, 9, 2},         // c f c
        {610, 0, 3, 0, 34, 2},      // c f f
        // S=f
        {1, 17, 1, 14, 0, 0},       // f t t
        {0, 9, 0, 0, 0, 0},         // f t c
        {4, 3, 5, 2, 0, 0},         // f t f
        {0, 0, 0, 0, 0, 0},         // f c t
        {0, 0, 0, 0, 1, 0},         // f c c
        {0, 0, 0, 0, 0, 0},         // f c f
        {7, 222, 16, 153, 4, 2},    // f f t
        {0, 184, 0, 1, 0, 4},       // f f c
        {48, 24, 105, 95, 1, 0},    // f f f
    };
    for (int p = 0; p < kPatternCount; ++p) {
      for (int o = 0; o < kOrderCount; ++o) pc.counts[p][o] = kCells[p][o];
    }
    return pc;
  }();
  return counts;
}

// Recounts a corpus back into a PatternCounts table.
inline PatternCounts count_back(const Corpus& corpus) {
  PatternCounts pc;
  for (const Sentence& s : corpus.sentences) ++pc.at(s.input, s.observed);
  return pc;
}

// Emits exactly counts[(p, o)] copies of every cell, then applies one seeded
// shuffle. Same counts and seed give a byte-identical corpus.
inline Corpus generate_corpus(const PatternCounts& counts, std::uint64_t shuffle_seed) {
  Corpus corpus;
  corpus.sentences.reserve(static_cast<std::size_t>(counts.total()));
  for (int p = 0; p < kPatternCount; ++p) {
    for (int o = 0; o < kOrderCount; ++o) {
      const Sentence s{InputPattern::from_index(p), static_cast<WordOrder>(o)};
      for (int k = 0; k < counts.counts[p][o]; ++k) corpus.sentences.push_back(s);
    }
  }
  Rng rng(mix_seed(shuffle_seed, 0x67656e /* "gen" */));
  rng.shuffle(corpus.sentences);
  corpus.provenance = "regen n=" + std::to_string(corpus.size()) +
                      " seed=" + std::to_string(shuffle_seed);
  return corpus;
}

// n i.i.d. draws from the joint cell distribution counts/total. Used to make
// fresh held-out sets that follow the training distribution.
inline Corpus resample_corpus(const PatternCounts& counts, int n, std::uint64_t seed) {
  const int total = counts.total();
  if (total <= 0) throw std::invalid_argument("resample_corpus: empty count table");
  if (n < 0) throw std::invalid_argument("resample_corpus: negative sample size");
  std::vector<int> cumulative;
  std::vector<Sentence> cells;
  cumulative.reserve(kPatternCount * kOrderCount);
  int running = 0;
  for (int p = 0; p < kPatternCount; ++p) {
    for (int o = 0; o < kOrderCount; ++o) {
      const int c = counts.counts[p][o];
      if (c == 0) continue;
      running += c;
      cumulative.push_back(running);
      cells.push_back({InputPattern::from_index(p), static_cast<WordOrder>(o)});
    }
  }
  Corpus corpus;
  corpus.sentences.reserve(static_cast<std::size_t>(n));
  Rng rng(mix_seed(seed, 0x726573 /* "res" */));
  for (int i = 0; i < n; ++i) {
    const int u = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(total)));
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] > u) hi = mid; else lo = mid + 1;
    }
    corpus.sentences.push_back(cells[lo]);
  }
  corpus.provenance = "resample n=" + std::to_string(n) + " seed=" + std::to_string(seed);
  return corpus;
}

struct SplitFractions {
  double train = 1.0;
  double dev = 0.0;
  double test = 0.0;
};

struct SplitResult {
  Corpus train, dev, test;
};

// Seeded disjoint partition. Dev and test sizes round down; the remainder
// goes to train.
inline SplitResult split(const Corpus& corpus, SplitFractions fractions, std::uint64_t seed) {
  const double sum = fractions.train + fractions.dev + fractions.test;
  if (fractions.train < 0 || fractions.dev < 0 || fractions.test < 0 ||
      sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9) {
    throw std::invalid_argument("split: fractions must be non-negative and sum to 1");
  }
  std::vector<Sentence> shuffled = corpus.sentences;
  Rng rng(mix_seed(seed, 0x73706c74 /* "splt" */));
  rng.shuffle(shuffled);
  const std::size_t n = shuffled.size();
  const auto n_dev = static_cast<std::size_t>(static_cast<double>(n) * fractions.dev);
  const auto n_test = static_cast<std::size_t>(static_cast<double>(n) * fractions.test);
  const std::size_t n_train = n - n_dev - n_test;
  SplitResult r;
  r.train.sentences.assign(shuffled.begin(), shuffled.begin() + n_train);
  r.dev.sentences.assign(shuffled.begin() + n_train, shuffled.begin() + n_train + n_dev);
  r.test.sentences.assign(shuffled.begin() + n_train + n_dev, shuffled.end());
  const std::string tag = " of (" + corpus.provenance + ") seed=" + std::to_string(seed);
  r.train.provenance = "split-train" + tag;
  r.dev.provenance = "split-dev" + tag;
  r.test.provenance = "split-test" + tag;
  return r;
}

// Fraction of sentences whose observed order is SVO: the no-information
// reference strategy.
inline double baseline_accuracy(const Corpus& corpus) {
  if (corpus.empty()) throw std::invalid_argument("baseline_accuracy: empty corpus");
  std::size_t svo = 0;
  for (const Sentence& s : corpus.sentences) {
    if (s.observed == WordOrder::SVO) ++svo;
  }
  return static_cast<double>(svo) / static_cast<double>(corpus.size());
}

// Memorizes the most frequent order per input pattern: the best any learner
// can do given only the discourse-function triple. Ties break toward the
// lower canonical order index; patterns unseen in training fall back to SVO.
struct UpperBoundPredictor {
  std::array<WordOrder, kPatternCount> modal{};

  WordOrder predict(InputPattern p) const { return modal[p.index()]; }
};

inline UpperBoundPredictor upper_bound_predictor(const Corpus& train) {
  if (train.empty()) throw std::invalid_argument("upper_bound_predictor: empty corpus");
  const PatternCounts counts = count_back(train);
  UpperBoundPredictor ub;
  for (int p = 0; p < kPatternCount; ++p) {
    int best_order = 0;
    int best_count = counts.counts[p][0];
    for (int o = 1; o < kOrderCount; ++o) {
      if (counts.counts[p][o] > best_count) {
        best_count = counts.counts[p][o];
        best_order = o;
      }
    }
    ub.modal[p] = best_count > 0 ? static_cast<WordOrder>(best_order) : WordOrder::SVO;
  }
  return ub;
}

inline double upper_bound_accuracy(const UpperBoundPredictor& predictor, const Corpus& eval) {
  if (eval.empty()) throw std::invalid_argument("upper_bound_accuracy: empty corpus");
  std::size_t correct = 0;
  for (const Sentence& s : eval.sentences) {
    if (predictor.predict(s.input) == s.observed) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(eval.size());
}

// ---------------------------------------------------------------------------
// Sentence file format: one sentence per line, "<s> <v> <o>\t<ORDER>", marks
// lowercase t/c/f, '#' lines are comments. Malformed lines are hard errors.

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void write_sentences(std::ostream& out, const Corpus& corpus) {
  if (!corpus.provenance.empty()) out << "# " << corpus.provenance << '\n';
  for (const Sentence& s : corpus.sentences) {
    out << pattern_to_string(s.input) << '\t' << order_name(s.observed) << '\n';
  }
}

inline void write_sentences_file(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_sentences(out, corpus);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline Corpus read_sentences(std::istream& in, const std::string& source = "<stream>") {
  Corpus corpus;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    const auto fail = [&](const std::string& why) {
      throw ParseError(source + ":" + std::to_string(line_number) + ": " + why);
    };
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) fail("expected two tab-separated fields");
    const std::string marks = line.substr(0, tab);
    const std::string order = line.substr(tab + 1);
    if (marks.size() != 5 || marks[1] != ' ' || marks[3] != ' ') {
      fail("pattern field must be three space-separated marks, e.g. 't f f'");
    }
    Sentence s;
    try {
      s.input = make_pattern(mark_from_letter(marks[0]), mark_from_letter(marks[2]),
                             mark_from_letter(marks[4]));
      s.observed = order_from_string(order);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    corpus.sentences.push_back(s);
  }
  corpus.provenance = "read from " + source;
  return corpus;
}

inline Corpus read_sentences_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_sentences(in, path);
}

// 27-row CSV of the joint counts, for external plotting.
inline std::string counts_csv(const PatternCounts& counts) {
  std::ostringstream out;
  out << "S,V,O,SVO,OVS,VSO,SOV,VOS,OSV\n";
  for (int p = 0; p < kPatternCount; ++p) {
    const InputPattern pat = InputPattern::from_index(p);
    out << mark_letter(pat.subject()) << ',' << mark_letter(pat.verb()) << ','
        << mark_letter(pat.object());
    for (int o = 0; o < kOrderCount; ++o) out << ',' << counts.counts[p][o];
    out << '\n';
  }
  return out.str();
}

}  // namespace wordorder
