#pragma once

// The end-to-end reproduction pipeline: regenerate the training corpus,
// train all four learners over N seeds, evaluate accuracy and weighted KL
// against fresh resampled test sets, and render one deterministic report.
// The CLI `repro` subcommand and the acceptance suite both run this.

#include <array>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "wordorder/corpus.hpp"
#include "wordorder/evaluation.hpp"
#include "wordorder/inference.hpp"
#include "wordorder/learners.hpp"

namespace wordorder {

struct ReproConfig {
  int num_seeds = 10;
  std::uint64_t base_seed = 1;
  int test_size = 1000;
  int accuracy_epochs = 10;    // perceptron epochs for the accuracy runs
  int variation_epochs = 50;   // perceptron/GLA epochs for the KL runs
  int cd_max_epochs = 200;
  int samples = 1000;
  PerceptronConfig perceptron;  // epochs overridden per run
  GlaConfig gla;                // SOT-trained; epochs = variation_epochs
  MaxEntConfig maxent;
  NoiseParams noise;
};

struct SeedOutcome {
  std::uint64_t seed_index = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t test_seed = 0;

  double baseline = 0.0;
  double upper_bound = 0.0;
  double perceptron_acc = 0.0;       // accuracy_epochs, hg-ml
  double gla_ml_acc = 0.0;           // SOT-trained, strict-ranking test
  double gla_sot_acc = 0.0;          // SOT-trained, sampled test
  double gla_mltrain_ml_acc = 0.0;   // ML-trained rows of the regime grid
  double gla_mltrain_sot_acc = 0.0;
  double maxent_acc = 0.0;

  double kl_perceptron = 0.0;  // variation_epochs, noisy-hg sampling
  double kl_gla = 0.0;         // variation_epochs, sot sampling
  double kl_maxent = 0.0;      // analytic
  double kl_uniform = 0.0;
  double kl_modal = 0.0;       // point mass on the per-pattern modal order

  // spotlight distributions for the two patterns discussed in the report
  PatternDistribution perc_ffc, perc_fff, gla_ffc, gla_fff, maxent_ffc, maxent_fff;
  double ffc_true_ovs = 0.0;
  double fff_true_sov = 0.0;

  int maxent_iterations = 0;
  bool maxent_converged = false;
};

struct ReproResults {
  ReproConfig config;
  double train_baseline = 0.0;     // exact, on the regenerated corpus
  double train_upper_bound = 0.0;
  int corpus_total = 0;
  std::vector<SeedOutcome> seeds;
  CdReport cd;
};

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

inline double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

template <typename Getter>
inline std::vector<double> collect(const std::vector<SeedOutcome>& seeds, Getter get) {
  std::vector<double> xs;
  xs.reserve(seeds.size());
  for (const auto& s : seeds) xs.push_back(get(s));
  return xs;
}

inline ReproResults run_repro(const ReproConfig& config) {
  ReproResults results;
  results.config = config;

  const PatternCounts& table = table2_counts();
  results.corpus_total = table.total();

  {
    const Corpus reference = generate_corpus(table, config.base_seed);
    results.train_baseline = baseline_accuracy(reference);
    results.train_upper_bound = upper_bound_accuracy(upper_bound_predictor(reference), reference);
    results.cd = cd_train(reference, config.cd_max_epochs).report;
  }

  const InputPattern ffc = make_pattern(DiscourseMark::Focus, DiscourseMark::Focus,
                                        DiscourseMark::ContrastiveTopic);
  const InputPattern fff =
      make_pattern(DiscourseMark::Focus, DiscourseMark::Focus, DiscourseMark::Focus);

  for (int k = 1; k <= config.num_seeds; ++k) {
    SeedOutcome out;
    out.seed_index = static_cast<std::uint64_t>(k);
    out.train_seed = mix_seed(config.base_seed, out.seed_index, 1);
    out.test_seed = mix_seed(config.base_seed, out.seed_index, 2);

    const Corpus train = generate_corpus(table, out.train_seed);
    const Corpus test = resample_corpus(table, config.test_size, out.test_seed);
    const auto truth = empirical_distributions(test);
    const UpperBoundPredictor ub = upper_bound_predictor(train);

    out.baseline = baseline_accuracy(test);
    out.upper_bound = upper_bound_accuracy(ub, test);

    PerceptronConfig pc = config.perceptron;
    pc.init_seed = mix_seed(config.base_seed, out.seed_index, 3);
    pc.epochs = config.accuracy_epochs;
    const auto perc_acc_run = perceptron_train(train, pc);
    out.perceptron_acc = accuracy(perc_acc_run.model, test, PredictionRegime::HgMl);
    pc.epochs = config.variation_epochs;
    const auto perc_var_run = perceptron_train(train, pc);

    GlaConfig gc = config.gla;
    gc.epochs = config.variation_epochs;
    gc.init_seed = mix_seed(config.base_seed, out.seed_index, 4);
    gc.train_prediction = TrainPrediction::SOT;
    const auto gla_sot_run = gla_train(train, gc);
    gc.train_prediction = TrainPrediction::ML;
    const auto gla_ml_run = gla_train(train, gc);

    const std::uint64_t eval_seed = mix_seed(config.base_seed, out.seed_index, 5);
    out.gla_ml_acc = accuracy(gla_sot_run.model, test, PredictionRegime::OtMl);
    out.gla_sot_acc =
        accuracy(gla_sot_run.model, test, PredictionRegime::SotSample, eval_seed, config.noise);
    out.gla_mltrain_ml_acc = accuracy(gla_ml_run.model, test, PredictionRegime::OtMl);
    out.gla_mltrain_sot_acc = accuracy(gla_ml_run.model, test, PredictionRegime::SotSample,
                                       mix_seed(eval_seed, 1), config.noise);

    const auto maxent_run = maxent_train(train, config.maxent);
    out.maxent_acc = accuracy(maxent_run.model, test, PredictionRegime::MaxentArgmax);
    out.maxent_iterations = maxent_run.diagnostics.iterations;
    out.maxent_converged = maxent_run.diagnostics.converged;

    // predicted distributions for every pattern
    std::array<PatternDistribution, kPatternCount> perc_d{}, gla_d{}, maxent_d{}, uniform_d{},
        modal_d{};
    const std::uint64_t dist_seed = mix_seed(config.base_seed, out.seed_index, 6);
    for (int p = 0; p < kPatternCount; ++p) {
      const InputPattern pat = InputPattern::from_index(p);
      perc_d[p] = predict_distribution(perc_var_run.model, pat, PredictionRegime::NoisyHgSample,
                                       config.samples, mix_seed(dist_seed, 1), config.noise);
      gla_d[p] = predict_distribution(gla_sot_run.model, pat, PredictionRegime::SotSample,
                                      config.samples, mix_seed(dist_seed, 2), config.noise);
      maxent_d[p] = predict_distribution(maxent_run.model, pat,
                                         PredictionRegime::MaxentDistribution, 0, 0);
      for (int o = 0; o < kOrderCount; ++o) uniform_d[p].probabilities[o] = 1.0 / kOrderCount;
      modal_d[p] = point_mass(ub.predict(pat));
      modal_d[p].samples = config.samples;  // smoothed like a sampled prediction
    }
    out.kl_perceptron = weighted_kl(truth, perc_d).weighted;
    out.kl_gla = weighted_kl(truth, gla_d).weighted;
    out.kl_maxent = weighted_kl(truth, maxent_d).weighted;
    out.kl_uniform = weighted_kl(truth, uniform_d).weighted;
    out.kl_modal = weighted_kl(truth, modal_d).weighted;

    out.perc_ffc = perc_d[ffc.index()];
    out.perc_fff = perc_d[fff.index()];
    out.gla_ffc = gla_d[ffc.index()];
    out.gla_fff = gla_d[fff.index()];
    out.maxent_ffc = maxent_d[ffc.index()];
    out.maxent_fff = maxent_d[fff.index()];
    out.ffc_true_ovs = truth.dists[ffc.index()].probabilities[static_cast<int>(WordOrder::OVS)];
    out.fff_true_sov = truth.dists[fff.index()].probabilities[static_cast<int>(WordOrder::SOV)];

    results.seeds.push_back(out);
  }
  return results;
}

namespace detail {

inline std::string mean_std_line(const char* label, const std::vector<double>& xs) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "  %-34s %.4f +/- %.4f\n", label, mean_of(xs), stddev_of(xs));
  return buf;
}

}  // namespace detail

inline std::string format_repro_report(const ReproResults& r) {
  std::ostringstream out;
  char buf[256];
  const auto& seeds = r.seeds;

  out << "word-order grammar learning: reproduction report\n";
  out << "=================================================\n";
  std::snprintf(buf, sizeof buf,
                "seeds: %d (base %llu); per-seed streams derived with mix(base, seed, stage)\n",
                r.config.num_seeds, static_cast<unsigned long long>(r.config.base_seed));
  out << buf;
  std::snprintf(buf, sizeof buf,
                "protocol: train on the regenerated %d-sentence corpus; evaluate on a fresh\n"
                "%d-sentence multinomial resample of the same distribution per seed\n",
                r.corpus_total, r.config.test_size);
  out << buf;
  out << "seed streams:";
  for (const auto& s : seeds) {
    std::snprintf(buf, sizeof buf, " %llu/%llu", static_cast<unsigned long long>(s.train_seed),
                  static_cast<unsigned long long>(s.test_seed));
    out << buf;
  }
  out << "\n\n";

  out << "exact training-corpus checks\n";
  std::snprintf(buf, sizeof buf, "  %-34s %d\n", "corpus size", r.corpus_total);
  out << buf;
  std::snprintf(buf, sizeof buf, "  %-34s %.6f\n", "always-SVO accuracy (train)",
                r.train_baseline);
  out << buf;
  std::snprintf(buf, sizeof buf, "  %-34s %.6f\n", "modal upper bound (train)",
                r.train_upper_bound);
  out << buf << '\n';

  out << "accuracy on resampled tests (mean +/- std over seeds)\n";
  out << detail::mean_std_line("baseline (always SVO)",
                               collect(seeds, [](const SeedOutcome& s) { return s.baseline; }));
  out << detail::mean_std_line("gla sot-train / ml-test", collect(seeds, [](const SeedOutcome& s) {
                                 return s.gla_ml_acc;
                               }));
  out << detail::mean_std_line("gla sot-train / sot-test",
                               collect(seeds, [](const SeedOutcome& s) { return s.gla_sot_acc; }));
  out << detail::mean_std_line("gla ml-train / ml-test", collect(seeds, [](const SeedOutcome& s) {
                                 return s.gla_mltrain_ml_acc;
                               }));
  out << detail::mean_std_line("gla ml-train / sot-test", collect(seeds, [](const SeedOutcome& s) {
                                 return s.gla_mltrain_sot_acc;
                               }));
  out << detail::mean_std_line("maxent argmax",
                               collect(seeds, [](const SeedOutcome& s) { return s.maxent_acc; }));
  out << detail::mean_std_line("perceptron hg-ml", collect(seeds, [](const SeedOutcome& s) {
                                 return s.perceptron_acc;
                               }));
  out << detail::mean_std_line("upper bound (modal)",
                               collect(seeds, [](const SeedOutcome& s) { return s.upper_bound; }));
  out << '\n';

  std::snprintf(buf, sizeof buf,
                "variation: weighted KL divergence in bits (mean +/- std over seeds)\n"
                "(%d samples per pattern; sampled predictions smoothed with eps = 1/(2*samples))\n",
                r.config.samples);
  out << buf;
  out << detail::mean_std_line("uniform distribution",
                               collect(seeds, [](const SeedOutcome& s) { return s.kl_uniform; }));
  out << detail::mean_std_line("modal point mass (smoothed)",
                               collect(seeds, [](const SeedOutcome& s) { return s.kl_modal; }));
  out << detail::mean_std_line("gla sot-sampled",
                               collect(seeds, [](const SeedOutcome& s) { return s.kl_gla; }));
  out << detail::mean_std_line("perceptron noisy-hg", collect(seeds, [](const SeedOutcome& s) {
                                 return s.kl_perceptron;
                               }));
  out << detail::mean_std_line("maxent analytic",
                               collect(seeds, [](const SeedOutcome& s) { return s.kl_maxent; }));
  out << '\n';

  out << "constraint demotion on the training corpus\n";
  std::snprintf(buf, sizeof buf, "  converged: %s after %d epochs (cap %d)\n",
                r.cd.converged ? "yes" : "NO -- rank swapping persists", r.cd.epochs_run,
                r.config.cd_max_epochs);
  out << buf;
  if (!r.cd.epoch_mistakes.empty()) {
    int lo = r.cd.epoch_mistakes[0], hi = r.cd.epoch_mistakes[0];
    for (int m : r.cd.epoch_mistakes) {
      lo = m < lo ? m : lo;
      hi = m > hi ? m : hi;
    }
    std::snprintf(buf, sizeof buf,
                  "  mistakes per epoch: first %d, last %d, min %d, max %d\n",
                  r.cd.epoch_mistakes.front(), r.cd.epoch_mistakes.back(), lo, hi);
    out << buf;
  }
  out << '\n';

  const auto dist_row = [&](const char* label, auto getter) {
    std::array<double, kOrderCount> m{};
    for (const auto& s : seeds) {
      const PatternDistribution& d = getter(s);
      for (int o = 0; o < kOrderCount; ++o) m[o] += d.probabilities[o];
    }
    std::string row = "    ";
    row += label;
    while (row.size() < 16) row.push_back(' ');
    for (int o = 0; o < kOrderCount; ++o) {
      std::snprintf(buf, sizeof buf, " %s=%.2f", order_name(static_cast<WordOrder>(o)),
                    m[o] / static_cast<double>(seeds.size()));
      row += buf;
    }
    return row + '\n';
  };
  out << "spotlight distributions (mean over seeds)\n";
  std::snprintf(buf, sizeof buf, "  input f f c (true OVS share %.2f):\n",
                mean_of(collect(seeds, [](const SeedOutcome& s) { return s.ffc_true_ovs; })));
  out << buf;
  out << dist_row("gla", [](const SeedOutcome& s) { return s.gla_ffc; });
  out << dist_row("perceptron", [](const SeedOutcome& s) { return s.perc_ffc; });
  out << dist_row("maxent", [](const SeedOutcome& s) { return s.maxent_ffc; });
  std::snprintf(buf, sizeof buf, "  input f f f (true SOV share %.2f):\n",
                mean_of(collect(seeds, [](const SeedOutcome& s) { return s.fff_true_sov; })));
  out << buf;
  out << dist_row("gla", [](const SeedOutcome& s) { return s.gla_fff; });
  out << dist_row("perceptron", [](const SeedOutcome& s) { return s.perc_fff; });
  out << dist_row("maxent", [](const SeedOutcome& s) { return s.maxent_fff; });

  bool all_converged = true;
  for (const auto& s : seeds) all_converged = all_converged && s.maxent_converged;
  std::snprintf(buf, sizeof buf, "\nmaxent: %s (iterations per seed:",
                all_converged ? "converged on every seed" : "DID NOT CONVERGE on some seeds");
  out << buf;
  for (const auto& s : seeds) out << ' ' << s.maxent_iterations;
  out << ")\n";
  return out.str();
}

}  // namespace wordorder
