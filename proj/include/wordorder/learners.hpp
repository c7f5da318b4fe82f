#pragma once

// The four training algorithms. The perceptron and the GLA share one
// mistake-driven update; they differ only in how they predict during
// training (weighted harmony vs. a strict ranking read off the weights,
// optionally with sampling noise). Constraint demotion maintains strata of
// an OT hierarchy, and MaxEnt fits a log-linear model in batch mode.

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wordorder/core.hpp"
#include "wordorder/corpus.hpp"
#include "wordorder/math.hpp"
#include "wordorder/rng.hpp"

namespace wordorder {

// ---------------------------------------------------------------------------
// Model container

enum class ModelKind : std::uint8_t { HG, SOT, OTStrata, MaxEnt };

inline const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::HG: return "HG";
    case ModelKind::SOT: return "SOT";
    case ModelKind::OTStrata: return "OT-strata";
    case ModelKind::MaxEnt: return "MaxEnt";
  }
  return "?";
}

inline ModelKind model_kind_from_name(const std::string& s) {
  if (s == "HG") return ModelKind::HG;
  if (s == "SOT") return ModelKind::SOT;
  if (s == "OT-strata") return ModelKind::OTStrata;
  if (s == "MaxEnt") return ModelKind::MaxEnt;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

// Strata: ordered partition of the constraint indices, highest first.
using Strata = std::vector<std::vector<std::uint8_t>>;

struct LearnedModel {
  ModelKind kind = ModelKind::HG;
  WeightVector weights{};                       // HG / SOT / MaxEnt
  Strata strata;                                // OT-strata
  std::map<std::string, std::string> metadata;  // config, seeds, diagnostics

  bool has_weights() const { return kind != ModelKind::OTStrata; }
};

// ---------------------------------------------------------------------------
// Shared update rule
//
// On a mistake the true and predicted labels disagree on some attributes;
// every such attribute moves one signed step toward the true label. With
// ternary values the raw difference is always -2, 0, or +2, so the step is
// step * sign(difference), exactly one unit of step per differing attribute
// (this is what the worked single-step example realizes).

inline void apply_signed_update(WeightVector& w, InputPattern input, WordOrder truth,
                                WordOrder predicted, double step,
                                const std::array<double, kConstraintCount>* divisors = nullptr) {
  const ViolationVector ft = evaluate_constraints(input, truth);
  const ViolationVector fp = evaluate_constraints(input, predicted);
  for (int j = 0; j < kConstraintCount; ++j) {
    const int diff = static_cast<int>(ft[j]) - static_cast<int>(fp[j]);
    if (diff == 0) continue;
    double delta = diff > 0 ? step : -step;
    if (divisors != nullptr) {
      if ((*divisors)[j] <= 0.0) continue;  // attribute never exercised: frozen
      delta /= (*divisors)[j];
    }
    w[j] += delta;
  }
}

// ---------------------------------------------------------------------------
// Perceptron (learns an HG grammar)

// Defaults were fixed by a dev-set sweep: with normalized updates the raw
// step is learning_rate / factor(j), i.e. about 0.01..0.026 per constraint,
// and the (0, 1) init keeps the weight scale commensurate with the noisy-
// sampling variance used in the variation experiments.
struct PerceptronConfig {
  int epochs = 10;                  // 50 for the variation experiments
  double learning_rate = 30.0;      // update step before normalization
  double lambda_trick_rate = 0.4;   // training-time bonus per past mistake
  std::uint64_t init_seed = 1;
  double init_low = 0.0;            // uniform random weight initialization
  double init_high = 1.0;
  bool use_normalization = true;
  bool reshuffle_each_epoch = false;
};

// Per-training-example mistake counters (the lambda-trick state).
using MistakeCounters = std::vector<int>;

// Per-constraint counts of non-vacuous evaluations over the training data,
// one evaluation per sentence at its observed order. Grammatical attributes
// apply to every sentence; information attributes only where the mark occurs.
using NormalizationFactors = std::array<double, kConstraintCount>;

inline NormalizationFactors compute_normalization(const Corpus& train) {
  if (train.empty()) throw std::invalid_argument("compute_normalization: empty corpus");
  NormalizationFactors f{};
  for (const Sentence& s : train.sentences) {
    const ViolationVector v = evaluate_constraints(s.input, s.observed);
    for (int j = 0; j < kConstraintCount; ++j) {
      if (v[j] != 0) f[j] += 1.0;
    }
  }
  return f;
}

// Training-time prediction: harmony plus the lambda-trick bonus on the true
// label. Test-time prediction never sees the counters.
inline WordOrder perceptron_train_predict(const WeightVector& w, InputPattern input,
                                          WordOrder truth, double bonus) {
  WordOrder best = WordOrder::SVO;
  double best_score = harmony(w, input, best) + (truth == best ? bonus : 0.0);
  for (int i = 1; i < kOrderCount; ++i) {
    const auto cand = static_cast<WordOrder>(i);
    const double score = harmony(w, input, cand) + (truth == cand ? bonus : 0.0);
    if (score > best_score) {
      best = cand;
      best_score = score;
    }
  }
  return best;
}

struct PerceptronResult {
  LearnedModel model;
  std::vector<double> epoch_train_accuracy;  // HG argmax on the training set
  std::vector<int> epoch_mistakes;
  MistakeCounters counters;
};

namespace detail {

// Training accuracy from collapsed pattern counts: the prediction is a pure
// function of the pattern, so only 27 argmaxes are needed.
inline double train_accuracy_from_counts(const PatternCounts& counts, int total,
                                         WordOrder (*predict)(const void*, InputPattern),
                                         const void* ctx) {
  int correct = 0;
  for (int p = 0; p < kPatternCount; ++p) {
    const WordOrder pred = predict(ctx, InputPattern::from_index(p));
    correct += counts.counts[p][static_cast<int>(pred)];
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace detail

inline PerceptronResult perceptron_train(const Corpus& train, const PerceptronConfig& config) {
  if (train.empty()) throw std::invalid_argument("perceptron_train: empty corpus");
  if (config.epochs < 1) throw std::invalid_argument("perceptron_train: epochs must be >= 1");
  if (config.learning_rate <= 0.0) {
    throw std::invalid_argument("perceptron_train: learning rate must be positive");
  }

  Rng rng(mix_seed(config.init_seed, 0x70657263 /* "perc" */));
  WeightVector w{};
  for (double& x : w) x = rng.uniform(config.init_low, config.init_high);

  NormalizationFactors factors{};
  if (config.use_normalization) factors = compute_normalization(train);

  const PatternCounts train_counts = count_back(train);
  const int total = static_cast<int>(train.size());

  PerceptronResult result;
  result.counters.assign(train.size(), 0);

  std::vector<std::uint32_t> visit_order(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) visit_order[i] = static_cast<std::uint32_t>(i);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.reshuffle_each_epoch && epoch > 0) rng.shuffle(visit_order);
    int mistakes = 0;
    for (const std::uint32_t i : visit_order) {
      const Sentence& s = train.sentences[i];
      const double bonus = config.lambda_trick_rate * result.counters[i];
      const WordOrder predicted = perceptron_train_predict(w, s.input, s.observed, bonus);
      if (predicted != s.observed) {
        ++result.counters[i];
        ++mistakes;
        apply_signed_update(w, s.input, s.observed, predicted, config.learning_rate,
                            config.use_normalization ? &factors : nullptr);
      }
    }
    result.epoch_mistakes.push_back(mistakes);
    result.epoch_train_accuracy.push_back(detail::train_accuracy_from_counts(
        train_counts, total,
        [](const void* ctx, InputPattern p) {
          return hg_predict(*static_cast<const WeightVector*>(ctx), p);
        },
        &w));
  }

  result.model.kind = ModelKind::HG;
  result.model.weights = w;
  result.model.metadata["learner"] = "perceptron";
  result.model.metadata["epochs"] = std::to_string(config.epochs);
  result.model.metadata["learning_rate"] = std::to_string(config.learning_rate);
  result.model.metadata["lambda_trick_rate"] = std::to_string(config.lambda_trick_rate);
  result.model.metadata["init_seed"] = std::to_string(config.init_seed);
  result.model.metadata["init_low"] = std::to_string(config.init_low);
  result.model.metadata["init_high"] = std::to_string(config.init_high);
  result.model.metadata["normalized_updates"] = config.use_normalization ? "1" : "0";
  return result;
}

// ---------------------------------------------------------------------------
// Gradual Learning Algorithm (learns a stochastic-OT grammar)

enum class TrainPrediction : std::uint8_t { ML, SOT };

struct GlaConfig {
  double plasticity = 0.01;
  double spreading = 2.0;
  int epochs = 50;
  TrainPrediction train_prediction = TrainPrediction::SOT;
  std::uint64_t init_seed = 1;
  double initial_value = 100.0;  // all ranking values start equal
  bool reshuffle_each_epoch = false;
};

struct GlaResult {
  LearnedModel model;
  std::vector<double> epoch_train_accuracy;  // ML (strict-ranking) prediction
  std::vector<int> epoch_mistakes;
};

// Strict ranking read off noise-perturbed ranking values.
inline WordOrder sot_sample_predict(const WeightVector& w, double spreading,
                                    InputPattern input, Rng& rng) {
  WeightVector noisy{};
  for (int j = 0; j < kConstraintCount; ++j) noisy[j] = w[j] + spreading * rng.normal();
  return ot_predict(ranking_from_weights(noisy), input);
}

inline GlaResult gla_train(const Corpus& train, const GlaConfig& config) {
  if (train.empty()) throw std::invalid_argument("gla_train: empty corpus");
  if (config.epochs < 1) throw std::invalid_argument("gla_train: epochs must be >= 1");
  if (config.plasticity <= 0.0) throw std::invalid_argument("gla_train: plasticity must be positive");
  if (config.spreading < 0.0) throw std::invalid_argument("gla_train: spreading must be >= 0");

  WeightVector w{};
  for (double& x : w) x = config.initial_value;

  Rng rng(mix_seed(config.init_seed, 0x676c61 /* "gla" */));
  const PatternCounts train_counts = count_back(train);
  const int total = static_cast<int>(train.size());

  std::vector<std::uint32_t> visit_order(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) visit_order[i] = static_cast<std::uint32_t>(i);

  GlaResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.reshuffle_each_epoch && epoch > 0) rng.shuffle(visit_order);
    int mistakes = 0;
    for (const std::uint32_t i : visit_order) {
      const Sentence& s = train.sentences[i];
      const WordOrder predicted =
          config.train_prediction == TrainPrediction::SOT
              ? sot_sample_predict(w, config.spreading, s.input, rng)
              : ot_predict(ranking_from_weights(w), s.input);
      if (predicted != s.observed) {
        ++mistakes;
        apply_signed_update(w, s.input, s.observed, predicted, config.plasticity);
      }
    }
    result.epoch_mistakes.push_back(mistakes);
    result.epoch_train_accuracy.push_back(detail::train_accuracy_from_counts(
        train_counts, total,
        [](const void* ctx, InputPattern p) {
          return ot_predict(ranking_from_weights(*static_cast<const WeightVector*>(ctx)), p);
        },
        &w));
  }

  result.model.kind = ModelKind::SOT;
  result.model.weights = w;
  result.model.metadata["learner"] = "gla";
  result.model.metadata["plasticity"] = std::to_string(config.plasticity);
  result.model.metadata["spreading"] = std::to_string(config.spreading);
  result.model.metadata["epochs"] = std::to_string(config.epochs);
  result.model.metadata["train_prediction"] =
      config.train_prediction == TrainPrediction::SOT ? "sot" : "ml";
  result.model.metadata["init_seed"] = std::to_string(config.init_seed);
  result.model.metadata["initial_value"] = std::to_string(config.initial_value);
  return result;
}

// Ranking values rescaled for reporting: once so they sum to 100, once so
// the spreading value becomes 1.
struct GlaNormalizedWeights {
  WeightVector sum_to_100{};
  WeightVector spreading_unit{};
};

inline GlaNormalizedWeights gla_normalized_weights(const WeightVector& w, double spreading) {
  GlaNormalizedWeights out;
  double sum = 0.0;
  for (double x : w) sum += x;
  for (int j = 0; j < kConstraintCount; ++j) {
    out.sum_to_100[j] = sum != 0.0 ? w[j] * 100.0 / sum : 0.0;
    out.spreading_unit[j] = spreading > 0.0 ? w[j] / spreading : w[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constraint Demotion (learns a strict hierarchy in strata)

// Candidates compare stratum by stratum on the summed attribute values of
// the stratum's constraints; the first stratum whose sums differ decides.
inline OtOrdering strata_compare(const Strata& strata, const ViolationVector& a,
                                 const ViolationVector& b) {
  for (const auto& stratum : strata) {
    int sum_a = 0, sum_b = 0;
    for (const std::uint8_t c : stratum) {
      sum_a += a[c];
      sum_b += b[c];
    }
    if (sum_a != sum_b) return sum_a > sum_b ? OtOrdering::AWins : OtOrdering::BWins;
  }
  return OtOrdering::Tie;
}

inline WordOrder strata_predict(const Strata& strata, InputPattern input) {
  WordOrder best = WordOrder::SVO;
  ViolationVector best_v = evaluate_constraints(input, best);
  for (int i = 1; i < kOrderCount; ++i) {
    const auto cand = static_cast<WordOrder>(i);
    const ViolationVector v = evaluate_constraints(input, cand);
    if (strata_compare(strata, v, best_v) == OtOrdering::AWins) {
      best = cand;
      best_v = v;
    }
  }
  return best;
}

struct CdReport {
  std::vector<int> epoch_mistakes;
  bool converged = false;  // reached a mistake-free epoch
  int epochs_run = 0;
};

struct CdResult {
  LearnedModel model;
  CdReport report;
};

namespace detail {

// One demotion step. Winner marks not dominated by the loser's highest
// uncanceled violation move to the stratum immediately below it.
inline void cd_demote(Strata& strata, InputPattern input, WordOrder winner, WordOrder loser) {
  const ViolationVector fw = evaluate_constraints(input, winner);
  const ViolationVector fl = evaluate_constraints(input, loser);

  std::array<int, kConstraintCount> stratum_of{};
  for (std::size_t s = 0; s < strata.size(); ++s) {
    for (const std::uint8_t c : strata[s]) stratum_of[c] = static_cast<int>(s);
  }

  int pivot = -1;  // highest stratum holding a loser-only violation
  for (int j = 0; j < kConstraintCount; ++j) {
    if (fl[j] == -1 && fw[j] != -1) {
      if (pivot < 0 || stratum_of[j] < pivot) pivot = stratum_of[j];
    }
  }
  if (pivot < 0) return;  // loser has no uncanceled violation: nothing to demote below

  std::vector<std::uint8_t> demoted;
  for (int j = 0; j < kConstraintCount; ++j) {
    if (fw[j] == -1 && fl[j] != -1 && stratum_of[j] <= pivot) {
      demoted.push_back(static_cast<std::uint8_t>(j));
    }
  }
  if (demoted.empty()) return;

  if (pivot + 1 >= static_cast<int>(strata.size())) strata.emplace_back();
  for (auto& stratum : strata) {
    auto keep_end = stratum.begin();
    for (const std::uint8_t c : stratum) {
      bool moving = false;
      for (const std::uint8_t d : demoted) moving = moving || c == d;
      if (!moving) *keep_end++ = c;
    }
    stratum.erase(keep_end, stratum.end());
  }
  auto& target = strata[static_cast<std::size_t>(pivot) + 1];
  target.insert(target.end(), demoted.begin(), demoted.end());
  // keep within-stratum order canonical and drop emptied strata
  for (auto& stratum : strata) {
    for (std::size_t i = 1; i < stratum.size(); ++i) {
      std::uint8_t key = stratum[i];
      std::size_t j = i;
      while (j > 0 && stratum[j - 1] > key) {
        stratum[j] = stratum[j - 1];
        --j;
      }
      stratum[j] = key;
    }
  }
  Strata compact;
  for (auto& stratum : strata) {
    if (!stratum.empty()) compact.push_back(std::move(stratum));
  }
  strata = std::move(compact);
}

}  // namespace detail

inline CdResult cd_train(const Corpus& train, int max_epochs) {
  if (train.empty()) throw std::invalid_argument("cd_train: empty corpus");
  if (max_epochs < 1) throw std::invalid_argument("cd_train: max_epochs must be >= 1");

  Strata strata(1);
  for (int j = 0; j < kConstraintCount; ++j) strata[0].push_back(static_cast<std::uint8_t>(j));

  CdResult result;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    int mistakes = 0;
    for (const Sentence& s : train.sentences) {
      const WordOrder predicted = strata_predict(strata, s.input);
      if (predicted != s.observed) {
        ++mistakes;
        detail::cd_demote(strata, s.input, s.observed, predicted);
      }
    }
    result.report.epoch_mistakes.push_back(mistakes);
    result.report.epochs_run = epoch + 1;
    if (mistakes == 0) {
      result.report.converged = true;
      break;
    }
  }

  result.model.kind = ModelKind::OTStrata;
  result.model.strata = strata;
  result.model.metadata["learner"] = "cd";
  result.model.metadata["max_epochs"] = std::to_string(max_epochs);
  result.model.metadata["epochs_run"] = std::to_string(result.report.epochs_run);
  result.model.metadata["converged"] = result.report.converged ? "1" : "0";
  return result;
}

// ---------------------------------------------------------------------------
// Maximum Entropy (batch log-linear model)

struct MaxEntConfig {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-6;  // max-norm of the objective gradient
  double l2_penalty = 0.0;
};

struct MaxEntDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_gradient_norm = 0.0;
  double final_log_likelihood = 0.0;
};

struct MaxEntResult {
  LearnedModel model;
  MaxEntDiagnostics diagnostics;
};

// P(o | p; w) over the six orders: exponentiated, normalized harmonies.
inline std::array<double, kOrderCount> maxent_distribution(const WeightVector& w,
                                                           InputPattern input) {
  std::array<double, kOrderCount> h{};
  double max_h = -1e300;
  for (int o = 0; o < kOrderCount; ++o) {
    h[o] = harmony(w, input, static_cast<WordOrder>(o));
    if (h[o] > max_h) max_h = h[o];
  }
  std::array<double, kOrderCount> p{};
  double z = 0.0;
  for (int o = 0; o < kOrderCount; ++o) {
    p[o] = det_exp(h[o] - max_h);
    z += p[o];
  }
  for (double& x : p) x /= z;
  return p;
}

// Log-likelihood of collapsed counts (no penalty term).
inline double maxent_log_likelihood(const WeightVector& w, const PatternCounts& counts) {
  double ll = 0.0;
  for (int pi = 0; pi < kPatternCount; ++pi) {
    const int n_p = counts.row_sum(pi);
    if (n_p == 0) continue;
    const InputPattern p = InputPattern::from_index(pi);
    std::array<double, kOrderCount> h{};
    double max_h = -1e300;
    for (int o = 0; o < kOrderCount; ++o) {
      h[o] = harmony(w, p, static_cast<WordOrder>(o));
      if (h[o] > max_h) max_h = h[o];
    }
    double z = 0.0;
    for (int o = 0; o < kOrderCount; ++o) z += det_exp(h[o] - max_h);
    const double log_z = max_h + det_log(z);
    for (int o = 0; o < kOrderCount; ++o) {
      if (counts.counts[pi][o] > 0) ll += counts.counts[pi][o] * (h[o] - log_z);
    }
  }
  return ll;
}

// Penalized objective (negated log-likelihood) and its gradient.
inline double maxent_objective(const WeightVector& w, const PatternCounts& counts,
                               double l2_penalty, WeightVector& grad_out) {
  grad_out.fill(0.0);
  double ll = 0.0;
  for (int pi = 0; pi < kPatternCount; ++pi) {
    const int n_p = counts.row_sum(pi);
    if (n_p == 0) continue;
    const InputPattern p = InputPattern::from_index(pi);
    const auto dist = maxent_distribution(w, p);
    std::array<double, kOrderCount> h{};
    for (int o = 0; o < kOrderCount; ++o) h[o] = harmony(w, p, static_cast<WordOrder>(o));
    double max_h = -1e300;
    for (double x : h) max_h = x > max_h ? x : max_h;
    double z = 0.0;
    for (int o = 0; o < kOrderCount; ++o) z += det_exp(h[o] - max_h);
    const double log_z = max_h + det_log(z);
    for (int o = 0; o < kOrderCount; ++o) {
      const ViolationVector f = evaluate_constraints(p, static_cast<WordOrder>(o));
      const double observed = counts.counts[pi][o];
      const double expected = n_p * dist[o];
      if (observed > 0) ll += observed * (h[o] - log_z);
      for (int j = 0; j < kConstraintCount; ++j) {
        grad_out[j] -= (observed - expected) * static_cast<double>(f[j]);
      }
    }
  }
  double penalty = 0.0;
  for (int j = 0; j < kConstraintCount; ++j) {
    penalty += l2_penalty * w[j] * w[j];
    grad_out[j] += 2.0 * l2_penalty * w[j];
  }
  return -ll + penalty;
}

namespace detail {

// Hessian of the negated log-likelihood: sum over patterns of
// n_p * Cov_p(f) under the current model, plus the penalty diagonal. The
// objective is convex but flat along a few feature-sum directions, so the
// solve is damped.
inline void maxent_hessian(const WeightVector& w, const PatternCounts& counts,
                           double l2_penalty, double hess[kConstraintCount][kConstraintCount]) {
  for (int a = 0; a < kConstraintCount; ++a) {
    for (int b = 0; b < kConstraintCount; ++b) hess[a][b] = 0.0;
  }
  for (int pi = 0; pi < kPatternCount; ++pi) {
    const int n_p = counts.row_sum(pi);
    if (n_p == 0) continue;
    const InputPattern p = InputPattern::from_index(pi);
    const auto dist = maxent_distribution(w, p);
    double mean[kConstraintCount] = {};
    ViolationVector f[kOrderCount];
    for (int o = 0; o < kOrderCount; ++o) {
      f[o] = evaluate_constraints(p, static_cast<WordOrder>(o));
      for (int j = 0; j < kConstraintCount; ++j) mean[j] += dist[o] * f[o][j];
    }
    for (int o = 0; o < kOrderCount; ++o) {
      for (int a = 0; a < kConstraintCount; ++a) {
        const double da = f[o][a] - mean[a];
        for (int b = 0; b < kConstraintCount; ++b) {
          hess[a][b] += n_p * dist[o] * da * (f[o][b] - mean[b]);
        }
      }
    }
  }
  for (int a = 0; a < kConstraintCount; ++a) hess[a][a] += 2.0 * l2_penalty;
}

// Solves (A + damping*I) x = b by Cholesky; A must be PSD.
inline bool solve_damped(double a[kConstraintCount][kConstraintCount], double damping,
                         const WeightVector& b, WeightVector& x) {
  double l[kConstraintCount][kConstraintCount] = {};
  for (int i = 0; i < kConstraintCount; ++i) a[i][i] += damping;
  for (int i = 0; i < kConstraintCount; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[i][j];
      for (int k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (sum <= 0.0) return false;
        l[i][i] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  WeightVector y{};
  for (int i = 0; i < kConstraintCount; ++i) {
    double sum = b[i];
    for (int k = 0; k < i; ++k) sum -= l[i][k] * y[k];
    y[i] = sum / l[i][i];
  }
  for (int i = kConstraintCount - 1; i >= 0; --i) {
    double sum = y[i];
    for (int k = i + 1; k < kConstraintCount; ++k) sum -= l[k][i] * x[k];
    x[i] = sum / l[i][i];
  }
  return true;
}

}  // namespace detail

inline MaxEntResult maxent_train(const Corpus& train, const MaxEntConfig& config) {
  if (train.empty()) throw std::invalid_argument("maxent_train: empty corpus");
  if (config.max_iterations < 1 || config.gradient_tolerance <= 0.0 || config.l2_penalty < 0.0) {
    throw std::invalid_argument("maxent_train: bad config");
  }
  const PatternCounts counts = count_back(train);

  // Damped Newton on the collapsed objective; twelve parameters, so exact
  // second-order steps are cheap and converge in a handful of iterations.
  WeightVector w{};
  WeightVector grad{};
  double fx = maxent_objective(w, counts, config.l2_penalty, grad);

  MaxEntResult result;
  const auto max_norm = [](const WeightVector& v) {
    double m = 0.0;
    for (double x : v) m = std::abs(x) > m ? std::abs(x) : m;
    return m;
  };

  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    if (max_norm(grad) <= config.gradient_tolerance) {
      result.diagnostics.converged = true;
      break;
    }
    double hess[kConstraintCount][kConstraintCount];
    detail::maxent_hessian(w, counts, config.l2_penalty, hess);
    double trace = 0.0;
    for (int j = 0; j < kConstraintCount; ++j) trace += hess[j][j];
    const double damping = 1e-9 * (trace > 1.0 ? trace : 1.0);

    WeightVector direction{};
    WeightVector neg_grad{};
    for (int j = 0; j < kConstraintCount; ++j) neg_grad[j] = -grad[j];
    if (!detail::solve_damped(hess, damping, neg_grad, direction)) {
      direction = neg_grad;  // degenerate Hessian: steepest descent
    }
    double dir_dot_grad = 0.0;
    for (int j = 0; j < kConstraintCount; ++j) dir_dot_grad += direction[j] * grad[j];
    if (dir_dot_grad >= 0.0) {
      direction = neg_grad;
      dir_dot_grad = 0.0;
      for (int j = 0; j < kConstraintCount; ++j) dir_dot_grad += direction[j] * grad[j];
    }

    double step = 1.0;
    WeightVector w_new{};
    WeightVector grad_new{};
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (int j = 0; j < kConstraintCount; ++j) w_new[j] = w[j] + step * direction[j];
      const double fx_new = maxent_objective(w_new, counts, config.l2_penalty, grad_new);
      if (fx_new <= fx + 1e-4 * step * dir_dot_grad) {
        fx = fx_new;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // line search exhausted: stop at the current point
    w = w_new;
    grad = grad_new;
  }

  if (!result.diagnostics.converged && max_norm(grad) <= config.gradient_tolerance) {
    result.diagnostics.converged = true;
  }
  result.diagnostics.iterations = iter;
  result.diagnostics.final_gradient_norm = max_norm(grad);
  result.diagnostics.final_log_likelihood = maxent_log_likelihood(w, counts);

  result.model.kind = ModelKind::MaxEnt;
  result.model.weights = w;
  result.model.metadata["learner"] = "maxent";
  result.model.metadata["max_iterations"] = std::to_string(config.max_iterations);
  result.model.metadata["gradient_tolerance"] = std::to_string(config.gradient_tolerance);
  result.model.metadata["l2_penalty"] = std::to_string(config.l2_penalty);
  result.model.metadata["iterations"] = std::to_string(result.diagnostics.iterations);
  result.model.metadata["converged"] = result.diagnostics.converged ? "1" : "0";
  return result;
}

// ---------------------------------------------------------------------------
// Model file format: "kind=<...>" header, then "weight <name> <decimal>" or
// "stratum <k>: <names>" lines, then "meta <key>=<value>" lines. Weights are
// written with 17 significant digits so files round-trip exactly.

inline std::string format_double17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string model_to_string(const LearnedModel& model) {
  std::ostringstream out;
  out << "kind=" << model_kind_name(model.kind) << '\n';
  if (model.kind == ModelKind::OTStrata) {
    for (std::size_t s = 0; s < model.strata.size(); ++s) {
      out << "stratum " << s << ':';
      for (const std::uint8_t c : model.strata[s]) out << ' ' << constraint_name(c);
      out << '\n';
    }
  } else {
    for (int j = 0; j < kConstraintCount; ++j) {
      out << "weight " << constraint_name(j) << ' ' << format_double17(model.weights[j]) << '\n';
    }
  }
  for (const auto& [key, value] : model.metadata) {
    out << "meta " << key << '=' << value << '\n';
  }
  return out.str();
}

inline LearnedModel model_from_string(const std::string& text, const std::string& source = "<string>") {
  LearnedModel model;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  bool have_kind = false;
  const auto fail = [&](const std::string& why) {
    throw ParseError(source + ":" + std::to_string(line_number) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head.rfind("kind=", 0) == 0) {
      try {
        model.kind = model_kind_from_name(head.substr(5));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      have_kind = true;
    } else if (head == "weight") {
      std::string name, value;
      if (!(ls >> name >> value)) fail("expected 'weight <name> <decimal>'");
      try {
        model.weights[constraint_from_name(name)] = std::stod(value);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    } else if (head == "stratum") {
      std::string index_token;
      if (!(ls >> index_token) || index_token.back() != ':') {
        fail("expected 'stratum <k>: <names>'");
      }
      std::vector<std::uint8_t> stratum;
      std::string name;
      while (ls >> name) {
        try {
          stratum.push_back(static_cast<std::uint8_t>(constraint_from_name(name)));
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      }
      model.strata.push_back(std::move(stratum));
    } else if (head == "meta") {
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
      const std::size_t eq = rest.find('=');
      if (eq == std::string::npos) fail("expected 'meta <key>=<value>'");
      model.metadata[rest.substr(0, eq)] = rest.substr(eq + 1);
    } else {
      fail("unrecognized line '" + line + "'");
    }
  }
  if (!have_kind) throw ParseError(source + ": missing 'kind=' header");
  return model;
}

inline void write_model_file(const std::string& path, const LearnedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << model_to_string(model);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline LearnedModel read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_string(buf.str(), path);
}

}  // namespace wordorder
