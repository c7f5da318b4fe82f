#include <string>

#include "doctest.h"
#include "wordorder/repro.hpp"

using namespace wordorder;

namespace {

const ReproResults& pipeline() {
  static const ReproResults r = run_repro(ReproConfig{});
  return r;
}

double mean(const ReproResults& r, double (*get)(const SeedOutcome&)) {
  return mean_of(collect(r.seeds, get));
}

}  // namespace

TEST_CASE("statistical ordering: perceptron > gla > baseline, close to the bound") {
  const ReproResults& r = pipeline();
  const double perc = mean(r, [](const SeedOutcome& s) { return s.perceptron_acc; });
  const double gla = mean(r, [](const SeedOutcome& s) { return s.gla_ml_acc; });
  const double base = mean(r, [](const SeedOutcome& s) { return s.baseline; });
  const double upper = mean(r, [](const SeedOutcome& s) { return s.upper_bound; });
  CHECK(perc > gla);
  CHECK(gla > base);
  CHECK(upper - perc < 0.03);  // the learned grammar sits near the memorizing bound
  CHECK(upper > perc);
}

TEST_CASE("resampled baseline stays near the corpus-wide SVO share") {
  const ReproResults& r = pipeline();
  const double base = mean(r, [](const SeedOutcome& s) { return s.baseline; });
  CHECK(base > 0.47);
  CHECK(base < 0.53);
}

TEST_CASE("sot-trained ranking values order like the published run") {
  // highest ranked constraint is c-topic left, lowest is focus left
  const Corpus train = generate_corpus(table2_counts(), 42);
  GlaConfig cfg;
  cfg.init_seed = 4;
  const auto res = gla_train(train, cfg);
  const Ranking ranking = ranking_from_weights(res.model.weights);
  CHECK(ranking.front() == constraint_from_name("ctopic-left"));
  CHECK(ranking.back() == constraint_from_name("focus-left"));
}

TEST_CASE("maxent weight order matches the published extremes") {
  const Corpus train = generate_corpus(table2_counts(), 42);
  const auto res = maxent_train(train, {});
  const Ranking ranking = ranking_from_weights(res.model.weights);
  CHECK(ranking.front() == constraint_from_name("ctopic-left"));
  CHECK(ranking.back() == constraint_from_name("verb-right"));
}

TEST_CASE("repro report carries the metadata and the headline sections") {
  const std::string report = format_repro_report(pipeline());
  CHECK(report.find("seed streams:") != std::string::npos);
  CHECK(report.find("always-SVO accuracy (train)") != std::string::npos);
  CHECK(report.find("0.499831") != std::string::npos);
  CHECK(report.find("0.681218") != std::string::npos);
  CHECK(report.find("gla sot-train / ml-test") != std::string::npos);
  CHECK(report.find("perceptron noisy-hg") != std::string::npos);
  CHECK(report.find("rank swapping") != std::string::npos);
  CHECK(report.find("input f f c") != std::string::npos);
  CHECK(report.find("converged on every seed") != std::string::npos);
}

TEST_CASE("constraint demotion on the full corpus never goes quiet") {
  const ReproResults& r = pipeline();
  CHECK(!r.cd.converged);
  CHECK(r.cd.epochs_run == 200);
  for (int m : r.cd.epoch_mistakes) CHECK(m > 0);
}
