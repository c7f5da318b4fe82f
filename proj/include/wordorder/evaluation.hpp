#pragma once

// Scoring and analysis: prediction accuracy under any regime, KL divergence
// between observed and predicted word-order distributions (weighted over
// input patterns), the cumulativity ("ganging-up") comparison between
// strict-ranking and weighted winners, and plain-text tableau rendering.

#include <array>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wordorder/core.hpp"
#include "wordorder/corpus.hpp"
#include "wordorder/inference.hpp"
#include "wordorder/learners.hpp"
#include "wordorder/math.hpp"

namespace wordorder {

// Fraction of eval sentences whose observed order the model predicts.
// Stochastic regimes draw one prediction per sentence with a seed derived
// from (seed, sentence index), so results are reproducible.
inline double accuracy(const LearnedModel& model, const Corpus& eval, PredictionRegime regime,
                       std::uint64_t seed = 0, const NoiseParams& noise = {}) {
  if (eval.empty()) throw std::invalid_argument("accuracy: empty corpus");
  check_regime_compatible(model, regime);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < eval.sentences.size(); ++i) {
    const Sentence& s = eval.sentences[i];
    const WordOrder pred = regime_is_stochastic(regime)
                               ? predict(model, s.input, regime, mix_seed(seed, i), noise)
                               : predict(model, s.input, regime);
    if (pred == s.observed) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(eval.size());
}

// ---------------------------------------------------------------------------
// KL divergence

// D_KL(true || predicted) in bits. 0 * log(0/q) = 0. Predicted distributions
// that came from finite sampling get add-epsilon smoothing with
// epsilon = 1/(2 * samples) per outcome (renormalized), so point-mass-prone
// samplers still yield finite divergences. Analytic distributions are used
// as-is.
inline double kl_divergence_bits(const PatternDistribution& truth,
                                 const PatternDistribution& predicted) {
  std::array<double, kOrderCount> q = predicted.probabilities;
  if (predicted.samples > 0) {
    const double eps = 1.0 / (2.0 * static_cast<double>(predicted.samples));
    double z = 0.0;
    for (double& x : q) {
      x += eps;
      z += x;
    }
    for (double& x : q) x /= z;
  }
  double kl = 0.0;
  for (int o = 0; o < kOrderCount; ++o) {
    const double p = truth.probabilities[o];
    if (p <= 0.0) continue;
    kl += p * det_log2(p / q[o]);
  }
  return kl;
}

// Per-pattern empirical word-order distributions of a corpus plus the
// pattern counts used as aggregation weights.
struct EmpiricalDistributions {
  std::array<PatternDistribution, kPatternCount> dists{};
  std::array<int, kPatternCount> pattern_counts{};
  int total = 0;
};

inline EmpiricalDistributions empirical_distributions(const Corpus& corpus) {
  EmpiricalDistributions e;
  const PatternCounts counts = count_back(corpus);
  for (int p = 0; p < kPatternCount; ++p) {
    const int n_p = counts.row_sum(p);
    e.pattern_counts[p] = n_p;
    e.total += n_p;
    if (n_p == 0) continue;
    for (int o = 0; o < kOrderCount; ++o) {
      e.dists[p].probabilities[o] =
          static_cast<double>(counts.counts[p][o]) / static_cast<double>(n_p);
    }
  }
  return e;
}

struct WeightedKlResult {
  double weighted = 0.0;                          // bits
  std::array<double, kPatternCount> per_pattern{};  // 0 where no test data
};

// Count-weighted average of per-pattern divergences; patterns absent from
// the reference corpus contribute nothing.
inline WeightedKlResult weighted_kl(
    const EmpiricalDistributions& truth,
    const std::array<PatternDistribution, kPatternCount>& predicted) {
  WeightedKlResult r;
  if (truth.total == 0) throw std::invalid_argument("weighted_kl: empty reference");
  for (int p = 0; p < kPatternCount; ++p) {
    if (truth.pattern_counts[p] == 0) continue;
    r.per_pattern[p] = kl_divergence_bits(truth.dists[p], predicted[p]);
    r.weighted += r.per_pattern[p] * static_cast<double>(truth.pattern_counts[p]) /
                  static_cast<double>(truth.total);
  }
  return r;
}

// Aggregate scoring summary for one (model, corpus, regime) evaluation.
// KL fields are filled only when a distribution comparison is requested.
struct EvaluationReport {
  double accuracy = 0.0;
  std::array<double, kPatternCount> per_pattern_accuracy{};  // -1 where no data
  std::array<int, kPatternCount> pattern_counts{};
  double kl_weighted = 0.0;
  std::array<double, kPatternCount> per_pattern_kl{};
  bool has_kl = false;
  std::map<std::string, std::string> run_metadata;
};

inline EvaluationReport evaluate_model(const LearnedModel& model, const Corpus& eval,
                                       PredictionRegime regime, std::uint64_t seed = 0,
                                       const NoiseParams& noise = {}) {
  if (eval.empty()) throw std::invalid_argument("evaluate_model: empty corpus");
  check_regime_compatible(model, regime);
  EvaluationReport report;
  std::array<int, kPatternCount> correct{};
  for (std::size_t i = 0; i < eval.sentences.size(); ++i) {
    const Sentence& s = eval.sentences[i];
    const WordOrder pred = regime_is_stochastic(regime)
                               ? predict(model, s.input, regime, mix_seed(seed, i), noise)
                               : predict(model, s.input, regime);
    ++report.pattern_counts[s.input.index()];
    if (pred == s.observed) ++correct[s.input.index()];
  }
  int total_correct = 0;
  for (int p = 0; p < kPatternCount; ++p) {
    total_correct += correct[p];
    report.per_pattern_accuracy[p] =
        report.pattern_counts[p] > 0
            ? static_cast<double>(correct[p]) / static_cast<double>(report.pattern_counts[p])
            : -1.0;
  }
  report.accuracy = static_cast<double>(total_correct) / static_cast<double>(eval.size());
  report.run_metadata["regime"] = regime_name(regime);
  report.run_metadata["seed"] = std::to_string(seed);
  report.run_metadata["sentences"] = std::to_string(eval.size());
  return report;
}

// ---------------------------------------------------------------------------
// Ganging-up analysis

struct DiscriminatingConstraint {
  int constraint = 0;
  double weight = 0.0;
  int value_a = 0;  // attribute value of candidate_a
  int value_b = 0;
};

// Compares two candidates under one weight vector: which constraints tell
// them apart, the winner under the strict ranking read off the weights, the
// winner under weighted harmony, and the restricted harmony of the weighted
// winner over just the differing constraints (positive when lower-weighted
// constraints jointly overturn the top differing constraint).
struct GangingReport {
  InputPattern input;
  WordOrder candidate_a = WordOrder::SVO;
  WordOrder candidate_b = WordOrder::SVO;
  WordOrder ot_winner = WordOrder::SVO;
  WordOrder hg_winner = WordOrder::SVO;
  std::vector<DiscriminatingConstraint> discriminating;
  double differing_sum_a = 0.0;  // restricted harmony of candidate_a
  double differing_sum_b = 0.0;
  double differing_sum = 0.0;    // restricted harmony of the HG-preferred side
  bool ganging_event = false;    // OT and HG winners disagree
};

inline GangingReport ganging_analysis(const WeightVector& weights, InputPattern input,
                                      WordOrder candidate_a, WordOrder candidate_b) {
  GangingReport rep;
  rep.input = input;
  rep.candidate_a = candidate_a;
  rep.candidate_b = candidate_b;

  const ViolationVector fa = evaluate_constraints(input, candidate_a);
  const ViolationVector fb = evaluate_constraints(input, candidate_b);
  const Ranking ranking = ranking_from_weights(weights);
  // list discriminating constraints in rank order, heaviest first
  for (int pos = 0; pos < kConstraintCount; ++pos) {
    const int j = ranking[pos];
    if (fa[j] == fb[j]) continue;
    rep.discriminating.push_back({j, weights[j], fa[j], fb[j]});
    rep.differing_sum_a += weights[j] * static_cast<double>(fa[j]);
    rep.differing_sum_b += weights[j] * static_cast<double>(fb[j]);
  }

  const OtOrdering ot = ot_compare(ranking, fa, fb);
  rep.ot_winner = ot == OtOrdering::BWins ? candidate_b : candidate_a;
  const double ha = harmony(weights, fa);
  const double hb = harmony(weights, fb);
  rep.hg_winner = hb > ha ? candidate_b : candidate_a;
  rep.differing_sum = rep.hg_winner == candidate_a ? rep.differing_sum_a : rep.differing_sum_b;
  rep.ganging_event = rep.ot_winner != rep.hg_winner;
  return rep;
}

// Scans the full input space comparing the strict-ranking winner and the
// weighted winner; returns one report per pattern where they disagree.
inline std::vector<GangingReport> scan_ganging(const WeightVector& weights) {
  std::vector<GangingReport> events;
  const Ranking ranking = ranking_from_weights(weights);
  for (int p = 0; p < kPatternCount; ++p) {
    const InputPattern pattern = InputPattern::from_index(p);
    const WordOrder ot = ot_predict(ranking, pattern);
    const WordOrder hg = hg_predict(weights, pattern);
    if (ot == hg) continue;
    events.push_back(ganging_analysis(weights, pattern, ot, hg));
  }
  return events;
}

// ---------------------------------------------------------------------------
// Tableau rendering (plain fixed-width text)

namespace detail {

inline std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline void pad_to(std::string& s, std::size_t width) {
  while (s.size() < width) s.push_back(' ');
}

}  // namespace detail

// Classic violation tableau: constraints in rank order across the top, 'x'
// where a candidate violates, '->' on the winner.
inline std::string render_ot_tableau(const Ranking& ranking, InputPattern input,
                                     const std::vector<WordOrder>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("render_ot_tableau: no candidates");
  WordOrder winner = candidates[0];
  ViolationVector winner_v = evaluate_constraints(input, winner);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const ViolationVector v = evaluate_constraints(input, candidates[i]);
    if (ot_compare(ranking, v, winner_v) == OtOrdering::AWins) {
      winner = candidates[i];
      winner_v = v;
    }
  }

  std::ostringstream out;
  out << "input: " << pattern_to_string(input) << '\n';
  std::vector<std::size_t> widths;
  std::string header = "      ";
  for (int pos = 0; pos < kConstraintCount; ++pos) {
    const std::string name = constraint_display_name(ranking[pos]);
    widths.push_back(name.size());
    header += "| " + name + ' ';
  }
  out << header << "|\n";
  for (const WordOrder cand : candidates) {
    const ViolationVector v = evaluate_constraints(input, cand);
    std::string row = cand == winner ? "-> " : "   ";
    row += order_name(cand);
    for (int pos = 0; pos < kConstraintCount; ++pos) {
      std::string cell = v[ranking[pos]] == -1 ? "x" : "";
      detail::pad_to(cell, widths[pos]);
      row += "| " + cell + ' ';
    }
    out << row << "|\n";
  }
  return out.str();
}

// Weighted tableau: constraints down the side in weight order with +/-/0
// attribute values per candidate, per-candidate harmony, and, for exactly
// two candidates, the summed weights of the differing constraints.
inline std::string render_hg_tableau(const WeightVector& weights, InputPattern input,
                                     const std::vector<WordOrder>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("render_hg_tableau: no candidates");
  const Ranking ranking = ranking_from_weights(weights);

  WordOrder winner = candidates[0];
  double winner_h = harmony(weights, input, winner);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double h = harmony(weights, input, candidates[i]);
    if (h > winner_h) {
      winner = candidates[i];
      winner_h = h;
    }
  }

  std::ostringstream out;
  out << "input: " << pattern_to_string(input) << '\n';
  constexpr std::size_t kNameWidth = 14;
  constexpr std::size_t kCellWidth = 9;
  std::string header(kNameWidth, ' ');
  {
    std::string w = "weight";
    detail::pad_to(w, kCellWidth);
    header += w;
  }
  for (const WordOrder cand : candidates) {
    std::string cell = order_name(cand);
    if (cand == winner) cell += " ->";
    detail::pad_to(cell, kCellWidth);
    header += cell;
  }
  out << header << '\n';

  for (int pos = 0; pos < kConstraintCount; ++pos) {
    const int j = ranking[pos];
    std::string row = constraint_display_name(j);
    detail::pad_to(row, kNameWidth);
    std::string w = detail::fixed2(weights[j]);
    detail::pad_to(w, kCellWidth);
    row += w;
    for (const WordOrder cand : candidates) {
      const int value = evaluate_constraints(input, cand)[j];
      std::string cell = value > 0 ? "+" : value < 0 ? "-" : "0";
      detail::pad_to(cell, kCellWidth);
      row += cell;
    }
    out << row << '\n';
  }

  std::string hrow = "harmony";
  detail::pad_to(hrow, kNameWidth + kCellWidth);
  for (const WordOrder cand : candidates) {
    std::string cell = detail::fixed2(harmony(weights, input, cand));
    detail::pad_to(cell, kCellWidth);
    hrow += cell;
  }
  out << hrow << '\n';

  if (candidates.size() == 2) {
    const GangingReport rep = ganging_analysis(weights, input, candidates[0], candidates[1]);
    std::string drow = "differing sum";
    detail::pad_to(drow, kNameWidth + kCellWidth);
    for (const double sum : {rep.differing_sum_a, rep.differing_sum_b}) {
      std::string cell = (sum >= 0 ? "+" : "") + detail::fixed2(sum);
      detail::pad_to(cell, kCellWidth);
      drow += cell;
    }
    out << drow << '\n';
  }
  return out.str();
}

}  // namespace wordorder
