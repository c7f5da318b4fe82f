// Command-line driver: corpus generation, training, evaluation, tableau
// analysis, and the multi-seed reproduction pipeline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wordorder/core.hpp"
#include "wordorder/corpus.hpp"
#include "wordorder/evaluation.hpp"
#include "wordorder/inference.hpp"
#include "wordorder/learners.hpp"
#include "wordorder/repro.hpp"

namespace {

using namespace wordorder;

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

InputPattern parse_pattern_arg(const std::string& arg) {
  // accepts "t,f,t" or "t f t" or "tft"
  std::string letters;
  for (char c : arg) {
    if (c == ',' || c == ' ') continue;
    letters.push_back(c);
  }
  if (letters.size() != 3) {
    throw std::invalid_argument("pattern must name three marks, e.g. t,f,t");
  }
  return make_pattern(mark_from_letter(letters[0]), mark_from_letter(letters[1]),
                      mark_from_letter(letters[2]));
}

PredictionRegime distribution_regime_for(const LearnedModel& model) {
  switch (model.kind) {
    case ModelKind::SOT: return PredictionRegime::SotSample;
    case ModelKind::MaxEnt: return PredictionRegime::MaxentDistribution;
    case ModelKind::OTStrata:
      throw std::invalid_argument(
          "distribution sampling needs a weights-based model (HG, SOT, or MaxEnt)");
    default: return PredictionRegime::NoisyHgSample;
  }
}

int cmd_generate(bool table2, int resample_n, std::uint64_t seed, const std::string& out_path,
                 const std::string& counts_csv_path) {
  const PatternCounts& counts = table2_counts();
  if (!counts_csv_path.empty()) {
    write_text_file(counts_csv_path, counts_csv(counts));
    std::printf("wrote %s\n", counts_csv_path.c_str());
  }
  if (out_path.empty()) {
    if (counts_csv_path.empty()) {
      throw std::invalid_argument("generate: nothing to do (need -o or --counts-csv)");
    }
    return 0;
  }
  Corpus corpus;
  if (resample_n > 0) {
    corpus = resample_corpus(counts, resample_n, seed);
  } else if (table2) {
    corpus = generate_corpus(counts, seed);
  } else {
    throw std::invalid_argument("generate: pass --table2 or --resample N");
  }
  write_sentences_file(out_path, corpus);
  std::printf("wrote %s (%zu sentences; %s)\n", out_path.c_str(), corpus.size(),
              corpus.provenance.c_str());
  return 0;
}

void write_learning_curve(const std::string& path, const std::vector<double>& acc,
                          const std::vector<int>& mistakes) {
  std::ostringstream out;
  out << "epoch,train_accuracy,mistakes\n";
  char buf[64];
  for (std::size_t e = 0; e < acc.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%d\n", e + 1, acc[e],
                  e < mistakes.size() ? mistakes[e] : 0);
    out << buf;
  }
  write_text_file(path, out.str());
}

int cmd_eval(const std::string& model_path, const std::string& test_path,
             const std::string& regime_name_arg, bool baselines, const std::string& train_path,
             bool distributions, bool per_pattern, int samples, std::uint64_t seed,
             const NoiseParams& noise, const std::string& report_path,
             const std::string& dist_csv_path) {
  const LearnedModel model = read_model_file(model_path);
  const Corpus test = read_sentences_file(test_path);
  const PredictionRegime regime = regime_from_name(regime_name_arg);

  std::printf("model: %s (%s)\n", model_path.c_str(), model_kind_name(model.kind));
  std::printf("test:  %s (%zu sentences)\n", test_path.c_str(), test.size());
  EvaluationReport report = evaluate_model(model, test, regime, seed, noise);
  std::printf("  %-28s %.4f\n", (std::string("accuracy (") + regime_name_arg + ")").c_str(),
              report.accuracy);
  if (baselines) {
    const Corpus train = train_path.empty() ? test : read_sentences_file(train_path);
    std::printf("  %-28s %.4f\n", "baseline (always SVO)", baseline_accuracy(test));
    std::printf("  %-28s %.4f\n", "upper bound (modal)",
                upper_bound_accuracy(upper_bound_predictor(train), test));
  }
  if (per_pattern) {
    std::printf("\nper-pattern accuracy\n  %-8s %6s %9s\n", "pattern", "count", "correct");
    for (int p = 0; p < kPatternCount; ++p) {
      if (report.pattern_counts[p] == 0) continue;
      std::printf("  %-8s %6d %9.4f\n", pattern_key(InputPattern::from_index(p)).c_str(),
                  report.pattern_counts[p], report.per_pattern_accuracy[p]);
    }
  }

  if (distributions) {
    const PredictionRegime dist_regime = distribution_regime_for(model);
    const auto truth = empirical_distributions(test);
    std::array<PatternDistribution, kPatternCount> predicted{};
    for (int p = 0; p < kPatternCount; ++p) {
      predicted[p] = predict_distribution(model, InputPattern::from_index(p), dist_regime,
                                          samples, mix_seed(seed, 100 + p, 0), noise);
    }
    if (!dist_csv_path.empty()) {
      write_text_file(dist_csv_path, distributions_csv(predicted));
      std::printf("wrote %s\n", dist_csv_path.c_str());
    }
    const auto kl = weighted_kl(truth, predicted);
    std::printf("\nper-pattern KL divergence, %s, %d samples, seed %llu\n",
                regime_name(dist_regime), samples, static_cast<unsigned long long>(seed));
    if (dist_regime != PredictionRegime::MaxentDistribution) {
      std::printf("(sampled predictions smoothed with eps = 1/(2*samples) before the KL)\n");
    }
    std::printf("  %-8s %6s %8s\n", "pattern", "count", "KL bits");
    for (int p = 0; p < kPatternCount; ++p) {
      if (truth.pattern_counts[p] == 0) continue;
      std::printf("  %-8s %6d %8.4f\n", pattern_key(InputPattern::from_index(p)).c_str(),
                  truth.pattern_counts[p], kl.per_pattern[p]);
    }
    std::printf("  weighted KL: %.4f bits\n", kl.weighted);

    if (!report_path.empty()) {
      std::ostringstream csv;
      csv << "pattern,count,kl_bits,SVO,OVS,VSO,SOV,VOS,OSV,samples\n";
      char buf[64];
      for (int p = 0; p < kPatternCount; ++p) {
        csv << pattern_key(InputPattern::from_index(p)) << ',' << truth.pattern_counts[p];
        std::snprintf(buf, sizeof buf, ",%.6f", kl.per_pattern[p]);
        csv << buf;
        for (int o = 0; o < kOrderCount; ++o) {
          std::snprintf(buf, sizeof buf, ",%.6f", predicted[p].probabilities[o]);
          csv << buf;
        }
        csv << ',' << predicted[p].samples << '\n';
      }
      write_text_file(report_path, csv.str());
      std::printf("wrote %s\n", report_path.c_str());
    }
  }
  return 0;
}

int cmd_analyze(const std::string& model_path, const std::string& pattern_arg,
                const std::string& candidates_arg, bool scan) {
  const LearnedModel model = read_model_file(model_path);
  if (!model.has_weights()) {
    throw std::invalid_argument("analyze requires a weights-based model (HG, SOT, or MaxEnt)");
  }
  const WeightVector& w = model.weights;
  const Ranking ranking = ranking_from_weights(w);

  if (scan) {
    const auto events = scan_ganging(w);
    std::printf("cumulativity scan over all %d input patterns\n", kPatternCount);
    if (events.empty()) {
      std::printf("strict-ranking and weighted winners agree on every pattern\n");
      return 0;
    }
    for (const auto& ev : events) {
      std::printf("  %s: strict-ranking winner %s, weighted winner %s\n",
                  pattern_key(ev.input).c_str(), order_name(ev.ot_winner),
                  order_name(ev.hg_winner));
    }
    std::printf("%zu pattern(s) disagree\n", events.size());
    return 0;
  }

  const InputPattern pattern = parse_pattern_arg(pattern_arg);
  std::vector<WordOrder> candidates;
  if (!candidates_arg.empty()) {
    std::string token;
    std::istringstream in(candidates_arg);
    while (std::getline(in, token, ',')) candidates.push_back(order_from_string(token));
    if (candidates.empty()) throw std::invalid_argument("no candidates parsed");
  } else {
    candidates.assign(kAllOrders.begin(), kAllOrders.end());
  }

  std::printf("strict-ranking tableau\n%s\n",
              render_ot_tableau(ranking, pattern, candidates).c_str());
  std::printf("weighted tableau\n%s\n", render_hg_tableau(w, pattern, candidates).c_str());

  const WordOrder ot = ot_predict(ranking, pattern);
  const WordOrder hg = hg_predict(w, pattern);
  if (ot == hg) {
    std::printf("verdict: no ganging-up event (both winners %s)\n", order_name(ot));
  } else {
    const GangingReport rep = ganging_analysis(w, pattern, ot, hg);
    std::printf("verdict: ganging-up event. strict ranking picks %s; the weighted sum picks %s\n",
                order_name(ot), order_name(hg));
    std::printf("discriminating constraints (weight, %s/%s):\n", order_name(ot), order_name(hg));
    for (const auto& d : rep.discriminating) {
      std::printf("  %-14s %7.2f  %+d / %+d\n", constraint_display_name(d.constraint), d.weight,
                  d.value_a, d.value_b);
    }
    std::printf("restricted harmony: %s %+.2f vs %s %+.2f\n", order_name(ot),
                rep.differing_sum_a, order_name(hg), rep.differing_sum_b);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Czech word-order grammar learners: perceptron-trained weighted constraint "
               "grammars, stochastic-ranking learning, constraint demotion, and maxent"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "write a corpus file or the counts CSV");
  bool gen_table2 = false;
  int gen_resample = 0;
  std::uint64_t gen_seed = 42;
  std::string gen_out, gen_counts_csv;
  gen->add_flag("--table2", gen_table2, "regenerate the full 2955-sentence training corpus");
  gen->add_option("--resample", gen_resample, "emit N sentences resampled from the distribution");
  gen->add_option("--seed", gen_seed, "shuffle/resample seed");
  gen->add_option("-o,--out", gen_out, "output sentence file");
  gen->add_option("--counts-csv", gen_counts_csv, "also write the 27x6 count table as CSV");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train a model on a corpus file");
  std::string learner, train_in, train_out, train_log;
  int epochs = -1, cd_max_epochs = 200, maxent_iters = 1000;
  std::uint64_t train_seed = 1;
  double lambda = 30.0, lambda_trick = 0.4, init_low = 0.0, init_high = 1.0;
  bool no_normalization = false, reshuffle = false;
  double plasticity = 0.01, spreading = 2.0;
  std::string train_prediction = "sot";
  double tolerance = 1e-6, l2 = 0.0;
  train_cmd->add_option("learner", learner, "perceptron | gla | cd | maxent")->required();
  train_cmd->add_option("--train", train_in, "training corpus file")->required();
  train_cmd->add_option("-o,--out", train_out, "model file to write")->required();
  train_cmd->add_option("--epochs", epochs, "training epochs (perceptron default 10, gla 50)");
  train_cmd->add_option("--seed", train_seed, "initialization seed");
  train_cmd->add_option("--log", train_log, "write per-epoch training accuracy CSV");
  train_cmd->add_option("--lambda", lambda, "perceptron update step");
  train_cmd->add_option("--lambda-trick", lambda_trick, "perceptron noise-robustness rate");
  train_cmd->add_option("--init-low", init_low, "perceptron init range low");
  train_cmd->add_option("--init-high", init_high, "perceptron init range high");
  train_cmd->add_flag("--no-normalization", no_normalization, "disable update normalization");
  train_cmd->add_flag("--reshuffle", reshuffle, "reshuffle corpus order every epoch");
  train_cmd->add_option("--plasticity", plasticity, "gla update step");
  train_cmd->add_option("--spreading", spreading, "gla ranking noise multiplier");
  train_cmd->add_option("--train-prediction", train_prediction, "gla: ml or sot");
  train_cmd->add_option("--max-epochs", cd_max_epochs, "cd epoch cap");
  train_cmd->add_option("--max-iterations", maxent_iters, "maxent iteration cap");
  train_cmd->add_option("--tolerance", tolerance, "maxent gradient max-norm tolerance");
  train_cmd->add_option("--l2", l2, "maxent L2 penalty");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model file on a corpus file");
  std::string eval_model, eval_test, eval_regime = "hg-ml", eval_train, eval_report;
  bool eval_baselines = false, eval_distributions = false, eval_per_pattern = false;
  int eval_samples = 1000;
  std::uint64_t eval_seed = 7;
  NoiseParams eval_noise;
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_option("--test", eval_test, "evaluation corpus file")->required();
  eval_cmd->add_option("--regime", eval_regime,
                       "hg-ml | ot-ml | sot-sample | noisy-hg-sample | maxent-argmax");
  eval_cmd->add_flag("--baselines", eval_baselines, "add always-SVO and modal upper-bound rows");
  eval_cmd->add_option("--train", eval_train, "training corpus for the upper-bound predictor");
  eval_cmd->add_flag("--per-pattern", eval_per_pattern, "print per-pattern accuracy rows");
  eval_cmd->add_flag("--distributions", eval_distributions,
                     "sample per-pattern distributions and report weighted KL");
  eval_cmd->add_option("--samples", eval_samples, "samples per pattern");
  eval_cmd->add_option("--seed", eval_seed, "sampling seed");
  eval_cmd->add_option("--noise-variance", eval_noise.hg_noise_variance,
                       "gaussian variance for noisy weighted sampling");
  eval_cmd->add_option("--spreading", eval_noise.sot_spreading,
                       "noise multiplier for stochastic-ranking sampling");
  eval_cmd->add_option("--report", eval_report, "write machine-readable CSV here");
  std::string eval_dist_csv;
  eval_cmd->add_option("--distributions-csv", eval_dist_csv,
                       "write the raw per-pattern distributions as CSV");

  // ---- analyze ----
  auto* an = app.add_subcommand("analyze", "tableaux and ganging-up verdict for an input");
  std::string an_model, an_pattern, an_candidates;
  bool an_scan = false;
  an->add_option("--model", an_model, "model file (weights-based)")->required();
  an->add_option("--pattern", an_pattern, "input pattern, e.g. t,f,t");
  an->add_option("--candidates", an_candidates, "comma-separated word orders (default all six)");
  an->add_flag("--scan", an_scan, "scan all 27 patterns for strict-vs-weighted disagreements");

  // ---- repro ----
  auto* rep = app.add_subcommand("repro", "run the full multi-seed reproduction pipeline");
  ReproConfig repro_cfg;
  std::string repro_out;
  rep->add_option("--seeds", repro_cfg.num_seeds, "number of seeds (default 10)");
  rep->add_option("--base-seed", repro_cfg.base_seed, "base seed (default 1)");
  rep->add_option("--test-size", repro_cfg.test_size, "resampled test size (default 1000)");
  rep->add_option("--samples", repro_cfg.samples, "distribution samples per pattern");
  rep->add_option("--accuracy-epochs", repro_cfg.accuracy_epochs,
                  "perceptron epochs for accuracy runs");
  rep->add_option("--variation-epochs", repro_cfg.variation_epochs,
                  "perceptron/gla epochs for KL runs");
  rep->add_option("-o,--out", repro_out, "also write the report to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_table2, gen_resample, gen_seed, gen_out, gen_counts_csv);
    }

    if (train_cmd->parsed()) {
      const Corpus corpus = read_sentences_file(train_in);
      if (learner == "perceptron") {
        PerceptronConfig cfg;
        cfg.epochs = epochs > 0 ? epochs : 10;
        cfg.learning_rate = lambda;
        cfg.lambda_trick_rate = lambda_trick;
        cfg.init_seed = train_seed;
        cfg.init_low = init_low;
        cfg.init_high = init_high;
        cfg.use_normalization = !no_normalization;
        cfg.reshuffle_each_epoch = reshuffle;
        const auto res = perceptron_train(corpus, cfg);
        write_model_file(train_out, res.model);
        if (!train_log.empty()) {
          write_learning_curve(train_log, res.epoch_train_accuracy, res.epoch_mistakes);
        }
        std::printf("perceptron: %d epochs, final train accuracy %.4f\n", cfg.epochs,
                    res.epoch_train_accuracy.back());
      } else if (learner == "gla") {
        GlaConfig cfg;
        cfg.epochs = epochs > 0 ? epochs : 50;
        cfg.plasticity = plasticity;
        cfg.spreading = spreading;
        cfg.init_seed = train_seed;
        cfg.reshuffle_each_epoch = reshuffle;
        if (train_prediction == "ml") {
          cfg.train_prediction = TrainPrediction::ML;
        } else if (train_prediction == "sot") {
          cfg.train_prediction = TrainPrediction::SOT;
        } else {
          throw std::invalid_argument("--train-prediction must be ml or sot");
        }
        const auto res = gla_train(corpus, cfg);
        write_model_file(train_out, res.model);
        if (!train_log.empty()) {
          write_learning_curve(train_log, res.epoch_train_accuracy, res.epoch_mistakes);
        }
        const auto norm = gla_normalized_weights(res.model.weights, cfg.spreading);
        std::printf("gla (%s-trained): %d epochs, final strict-ranking train accuracy %.4f\n",
                    train_prediction.c_str(), cfg.epochs, res.epoch_train_accuracy.back());
        std::printf("ranking values (sum-100 / spreading-normalized):\n");
        const Ranking ranking = ranking_from_weights(res.model.weights);
        for (int pos = 0; pos < kConstraintCount; ++pos) {
          const int j = ranking[pos];
          std::printf("  %-14s %6.2f %8.2f\n", constraint_display_name(j), norm.sum_to_100[j],
                      norm.spreading_unit[j]);
        }
      } else if (learner == "cd") {
        const auto res = cd_train(corpus, epochs > 0 ? epochs : cd_max_epochs);
        write_model_file(train_out, res.model);
        if (res.report.converged) {
          std::printf("cd: converged after %d epochs\n", res.report.epochs_run);
        } else {
          std::printf("cd: WARNING: no mistake-free epoch within %d epochs; the hierarchy keeps "
                      "rank-swapping on this data (last epoch: %d mistakes)\n",
                      res.report.epochs_run, res.report.epoch_mistakes.back());
        }
      } else if (learner == "maxent") {
        MaxEntConfig cfg;
        cfg.max_iterations = maxent_iters;
        cfg.gradient_tolerance = tolerance;
        cfg.l2_penalty = l2;
        const auto res = maxent_train(corpus, cfg);
        write_model_file(train_out, res.model);
        std::printf("maxent: %s in %d iterations (gradient max-norm %.2e)\n",
                    res.diagnostics.converged ? "converged" : "DID NOT CONVERGE",
                    res.diagnostics.iterations, res.diagnostics.final_gradient_norm);
      } else {
        throw std::invalid_argument("unknown learner '" + learner +
                                    "' (expected perceptron, gla, cd, or maxent)");
      }
      std::printf("wrote %s\n", train_out.c_str());
      return 0;
    }

    if (eval_cmd->parsed()) {
      return cmd_eval(eval_model, eval_test, eval_regime, eval_baselines, eval_train,
                      eval_distributions, eval_per_pattern, eval_samples, eval_seed, eval_noise,
                      eval_report, eval_dist_csv);
    }

    if (an->parsed()) {
      if (!an_scan && an_pattern.empty()) {
        throw std::invalid_argument("analyze: pass --pattern or --scan");
      }
      return cmd_analyze(an_model, an_pattern, an_candidates, an_scan);
    }

    if (rep->parsed()) {
      const ReproResults results = run_repro(repro_cfg);
      const std::string report = format_repro_report(results);
      std::fputs(report.c_str(), stdout);
      if (!repro_out.empty()) write_text_file(repro_out, report);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
