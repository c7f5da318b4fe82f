#pragma once

// Prediction regimes over learned models: deterministic argmax prediction
// (weighted or strict-ranking), stochastic sampling (stochastic-OT and noisy
// weighted sampling), and per-input probability distributions over the six
// word orders.

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wordorder/core.hpp"
#include "wordorder/learners.hpp"
#include "wordorder/rng.hpp"

namespace wordorder {

enum class PredictionRegime : std::uint8_t {
  HgMl,          // argmax of weighted harmony
  OtMl,          // strict ranking read off the weights (or strata for CD)
  SotSample,     // spreading * N(0,1) per weight, then strict ranking
  NoisyHgSample, // N(0, variance) per weight, then harmony argmax
  MaxentArgmax,
  MaxentDistribution,
};

inline const char* regime_name(PredictionRegime r) {
  switch (r) {
    case PredictionRegime::HgMl: return "hg-ml";
    case PredictionRegime::OtMl: return "ot-ml";
    case PredictionRegime::SotSample: return "sot-sample";
    case PredictionRegime::NoisyHgSample: return "noisy-hg-sample";
    case PredictionRegime::MaxentArgmax: return "maxent-argmax";
    case PredictionRegime::MaxentDistribution: return "maxent-distribution";
  }
  return "?";
}

inline PredictionRegime regime_from_name(const std::string& s) {
  for (PredictionRegime r :
       {PredictionRegime::HgMl, PredictionRegime::OtMl, PredictionRegime::SotSample,
        PredictionRegime::NoisyHgSample, PredictionRegime::MaxentArgmax,
        PredictionRegime::MaxentDistribution}) {
    if (s == regime_name(r)) return r;
  }
  throw std::invalid_argument("unknown prediction regime '" + s + "'");
}

inline bool regime_is_stochastic(PredictionRegime r) {
  return r == PredictionRegime::SotSample || r == PredictionRegime::NoisyHgSample;
}

struct NoiseParams {
  double sot_spreading = 2.0;       // std-dev multiplier for strict-ranking noise
  double hg_noise_variance = 0.001; // Gaussian variance for noisy weighted sampling
};

inline void check_regime_compatible(const LearnedModel& model, PredictionRegime regime) {
  if (model.kind == ModelKind::OTStrata) {
    if (regime != PredictionRegime::OtMl) {
      throw std::invalid_argument(std::string("regime ") + regime_name(regime) +
                                  " requires weights; OT-strata models only support ot-ml");
    }
    return;
  }
  if ((regime == PredictionRegime::MaxentArgmax ||
       regime == PredictionRegime::MaxentDistribution) &&
      model.kind != ModelKind::MaxEnt) {
    throw std::invalid_argument(std::string("regime ") + regime_name(regime) +
                                " requires a MaxEnt model, got " + model_kind_name(model.kind));
  }
}

// Single prediction. Stochastic regimes consume the given seed; determinism
// across calls comes from the caller deriving per-use seeds.
inline WordOrder predict(const LearnedModel& model, InputPattern input,
                         PredictionRegime regime, std::uint64_t rng_seed = 0,
                         const NoiseParams& noise = {}) {
  check_regime_compatible(model, regime);
  switch (regime) {
    case PredictionRegime::HgMl:
    case PredictionRegime::MaxentArgmax:
      return hg_predict(model.weights, input);
    case PredictionRegime::OtMl:
      if (model.kind == ModelKind::OTStrata) return strata_predict(model.strata, input);
      return ot_predict(ranking_from_weights(model.weights), input);
    case PredictionRegime::SotSample: {
      Rng rng(mix_seed(rng_seed, 0x736f74 /* "sot" */));
      return sot_sample_predict(model.weights, noise.sot_spreading, input, rng);
    }
    case PredictionRegime::NoisyHgSample: {
      Rng rng(mix_seed(rng_seed, 0x6e6867 /* "nhg" */));
      const double sd = std::sqrt(noise.hg_noise_variance);
      WeightVector noisy{};
      for (int j = 0; j < kConstraintCount; ++j) {
        noisy[j] = model.weights[j] + sd * rng.normal();
      }
      return hg_predict(noisy, input);
    }
    case PredictionRegime::MaxentDistribution:
      throw std::invalid_argument("maxent-distribution does not produce a single order; "
                                  "use predict_distribution");
  }
  throw std::logic_error("unreachable");
}

// A probability distribution over the six orders for one input pattern.
// samples == 0 marks an analytic distribution.
struct PatternDistribution {
  std::array<double, kOrderCount> probabilities{};
  int samples = 0;

  WordOrder modal() const {
    int best = 0;
    for (int o = 1; o < kOrderCount; ++o) {
      if (probabilities[o] > probabilities[best]) best = o;
    }
    return static_cast<WordOrder>(best);
  }
};

inline PatternDistribution point_mass(WordOrder o) {
  PatternDistribution d;
  d.probabilities[static_cast<int>(o)] = 1.0;
  return d;
}

// Empirical frequency of per-sample predictions for sampling regimes; exact
// softmax for maxent-distribution; a point mass for deterministic regimes.
// Per-sample seeds are derived from (seed, pattern, sample counter), so the
// result does not depend on evaluation order.
inline PatternDistribution predict_distribution(const LearnedModel& model, InputPattern input,
                                                PredictionRegime regime, int samples,
                                                std::uint64_t rng_seed,
                                                const NoiseParams& noise = {}) {
  check_regime_compatible(model, regime);
  if (regime == PredictionRegime::MaxentDistribution) {
    PatternDistribution d;
    d.probabilities = maxent_distribution(model.weights, input);
    d.samples = 0;
    return d;
  }
  if (!regime_is_stochastic(regime)) {
    PatternDistribution d = point_mass(predict(model, input, regime));
    d.samples = 0;
    return d;
  }
  if (samples < 1) throw std::invalid_argument("predict_distribution: samples must be >= 1");
  std::array<int, kOrderCount> hits{};
  const auto pattern_id = static_cast<std::uint64_t>(input.index());
  for (int k = 0; k < samples; ++k) {
    const std::uint64_t seed = mix_seed(rng_seed, pattern_id, static_cast<std::uint64_t>(k));
    ++hits[static_cast<int>(predict(model, input, regime, seed, noise))];
  }
  PatternDistribution d;
  for (int o = 0; o < kOrderCount; ++o) {
    d.probabilities[o] = static_cast<double>(hits[o]) / static_cast<double>(samples);
  }
  d.samples = samples;
  return d;
}

// CSV with one row per requested pattern.
inline std::string distributions_csv(
    const std::array<PatternDistribution, kPatternCount>& dists) {
  std::ostringstream out;
  out << "pattern,SVO,OVS,VSO,SOV,VOS,OSV,samples\n";
  char buf[32];
  for (int p = 0; p < kPatternCount; ++p) {
    out << pattern_key(InputPattern::from_index(p));
    for (int o = 0; o < kOrderCount; ++o) {
      std::snprintf(buf, sizeof buf, "%.6f", dists[p].probabilities[o]);
      out << ',' << buf;
    }
    out << ',' << dists[p].samples << '\n';
  }
  return out.str();
}

}  // namespace wordorder
