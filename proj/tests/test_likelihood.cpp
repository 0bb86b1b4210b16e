#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "shmm/errors.hpp"
#include "shmm/likelihood.hpp"

using namespace shmm;

namespace {

// Built by hand so the oracle does not share code with symmetric_params.
HmmParams hand_params(double theta, double e) {
  HmmParams p;
  p.pi = Eigen::Vector2d(0.5, 0.5);
  p.T.resize(2, 2);
  p.T << theta, 1 - theta, 1 - theta, theta;
  p.O.resize(2, 2);
  p.O << e, 1 - e, 1 - e, e;
  return p;
}

double emit(int x, int h) { return x == h ? 0.7 : 0.3; }

}  // namespace

TEST_CASE("likelihood_at examples") {
  SymmetricHmmSpec spec;
  for (double theta : {0.0, 0.3, 1.0}) {
    spec.theta = theta;
    CHECK(std::abs(likelihood_at(spec, {0}) - 0.5) <= 1e-15);
    CHECK(std::abs(likelihood_at(spec, {1}) - 0.5) <= 1e-15);
  }
  spec.theta = 1.0;
  CHECK(std::abs(likelihood_at(spec, {0, 0}) - 0.29) <= 1e-15);
  CHECK_THROWS_AS(likelihood_at(spec, {0, 2}), ValidationError);
  spec.theta = 1.5;
  CHECK_THROWS_AS(likelihood_at(spec, {0}), ValidationError);
}

TEST_CASE("likelihood_at matches hidden-path enumeration") {
  std::mt19937_64 rng(4);
  SymmetricHmmSpec spec;
  for (double theta : theta_grid(101)) {
    spec.theta = theta;
    const HmmParams p = hand_params(theta, 0.7);
    for (int t = 1; t <= 8; ++t) {
      const Sequence x = oracle::random_sequence(rng, 2, t);
      CHECK(std::abs(likelihood_at(spec, x) - oracle::joint_by_paths(p, x)) <= 1e-12);
    }
  }
}

TEST_CASE("degenerate theta closed forms") {
  std::mt19937_64 rng(8);
  SymmetricHmmSpec spec;
  for (int rep = 0; rep < 20; ++rep) {
    const Sequence x = oracle::random_sequence(rng, 2, 1 + rep % 12);
    double frozen0 = 1, frozen1 = 1, alt0 = 1, alt1 = 1;
    for (std::size_t k = 0; k < x.size(); ++k) {
      frozen0 *= emit(x[k], 0);
      frozen1 *= emit(x[k], 1);
      alt0 *= emit(x[k], static_cast<int>(k % 2));
      alt1 *= emit(x[k], static_cast<int>((k + 1) % 2));
    }
    spec.theta = 1.0;
    CHECK(std::abs(likelihood_at(spec, x) - 0.5 * (frozen0 + frozen1)) <= 1e-15);
    spec.theta = 0.0;
    CHECK(std::abs(likelihood_at(spec, x) - 0.5 * (alt0 + alt1)) <= 1e-15);
  }
}

TEST_CASE("likelihood_curve") {
  const LikelihoodCurve flat = likelihood_curve({}, {1}, 11);
  CHECK(flat.thetas.size() == 11);
  CHECK(flat.thetas.front() == 0.0);
  CHECK(flat.thetas.back() == 1.0);
  for (double v : flat.values) CHECK(std::abs(v - 0.5) <= 1e-15);
  CHECK(count_unimodal_modes(flat.values) == 1);

  const LikelihoodCurve c = likelihood_curve({}, {0, 0, 1, 1, 0, 1, 1, 1}, 101);
  CHECK(c.sequence_length == 8);
  for (double v : c.values) CHECK((v >= 0.0 && v <= 1.0));
  CHECK_THROWS_AS(theta_grid(1), ValidationError);
}

TEST_CASE("count_unimodal_modes") {
  using V = std::vector<double>;
  CHECK(count_unimodal_modes(V{2, 2, 2, 2}) == 1);
  CHECK(count_unimodal_modes(V{0, 1, 0}) == 1);
  CHECK(count_unimodal_modes(V{0, 1, 0, 1, 0}) == 2);
  CHECK(count_unimodal_modes(V{3, 2, 1}) == 1);
  CHECK(count_unimodal_modes(V{1, 2, 3}) == 1);
  CHECK(count_unimodal_modes(V{0, 1, 1, 1, 0}) == 1);
  CHECK(count_unimodal_modes(V{1, 0, 1}) == 2);
  CHECK(count_unimodal_modes(V{0, 1, 1, 2, 0}) == 1);
  CHECK_THROWS_AS(count_unimodal_modes(V{1, 2}), ValidationError);
}

TEST_CASE("curves csv") {
  std::stringstream out;
  write_curves_csv(out, {likelihood_curve({}, {0}, 2)});
  CHECK(out.str() == "theta,likelihood,t\n0,0.5,1\n1,0.5,1\n");
}

TEST_CASE("em_consistency_experiment is deterministic and well formed") {
  const HmmParams truth = random_hmm(2, 2, 7);
  const EmConfig cfg{2, 50, 1e-8, 2, 0};
  const auto a = em_consistency_experiment(truth, {100, 300}, 2, cfg, 6, 11);
  const auto b = em_consistency_experiment(truth, {100, 300}, 2, cfg, 6, 11);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].N == b[i].N);
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].em_loglik == b[i].em_loglik);
    CHECK(a[i].true_loglik == b[i].true_loglik);
    CHECK(a[i].em_loglik < 0.0);
  }
  CHECK(a[0].N == 100);
  CHECK(a[3].N == 300);
  CHECK(a[0].seed != a[1].seed);

  // true_loglik is the training log-likelihood under the truth.
  const Dataset train = sample_sequences(truth, 100, 6, a[0].seed);
  CHECK(std::abs(a[0].true_loglik - log_likelihood(truth, train)) <= 1e-9 * std::abs(a[0].true_loglik));

  CHECK_THROWS_AS(em_consistency_experiment(random_hmm(3, 2, 1), {100}, 1, cfg, 6, 1), ValidationError);
  CHECK_THROWS_AS(em_consistency_experiment(truth, {}, 1, cfg, 6, 1), ValidationError);

  std::stringstream out;
  write_consistency_csv(out, a);
  CHECK(out.str().rfind("N,trial,seed,em_loglik,true_loglik\n100,0,", 0) == 0);
}
