#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "shmm/em.hpp"
#include "shmm/errors.hpp"

using namespace shmm;

TEST_CASE("forward_backward with one state") {
  Eigen::VectorXd pi(1);
  pi << 1;
  Eigen::MatrixXd T(1, 1);
  T << 1;
  Eigen::MatrixXd O(2, 1);
  O << 0.4, 0.6;
  const auto fb = forward_backward(validate_params(pi, T, O), {0, 1, 1});
  CHECK((fb.gamma.array() - 1.0).abs().maxCoeff() <= 1e-15);
  for (const auto& xi : fb.xi) CHECK(std::abs(xi(0, 0) - 1.0) <= 1e-15);
  CHECK(std::abs(fb.loglik - std::log(0.4 * 0.6 * 0.6)) <= 1e-14);
}

TEST_CASE("forward_backward posteriors match path enumeration") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 25; ++rep) {
    const HmmParams p = oracle::random_params(rng, 2, 2);
    const Sequence x = oracle::random_sequence(rng, 2, 3);
    const auto fb = forward_backward(p, x);
    const auto ref = oracle::posteriors_by_paths(p, x);
    CHECK((fb.gamma - ref.gamma).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t k = 0; k < ref.xi.size(); ++k) CHECK((fb.xi[k] - ref.xi[k]).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(fb.loglik - std::log(ref.likelihood)) <= 1e-12);
  }
}

TEST_CASE("forward_backward log-likelihood agrees with the forward probability") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 1 + rep % 4;
    const int n = 2 + rep % 3;
    const HmmParams p = oracle::random_params(rng, m, n);
    const Sequence x = oracle::random_sequence(rng, n, 1 + rep % 10);
    const auto fb = forward_backward(p, x);
    const double direct = joint_probability_forward(p, x);
    CHECK(std::abs(std::exp(fb.loglik) - direct) <= 1e-9 * direct);
    for (Eigen::Index k = 0; k < fb.gamma.cols(); ++k) CHECK(std::abs(fb.gamma.col(k).sum() - 1.0) <= 1e-10);
  }
}

TEST_CASE("impossible sequences are flagged with -inf") {
  Eigen::VectorXd pi(2);
  pi << 1, 0;
  const HmmParams chain = validate_params(pi, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2));
  const auto fb = forward_backward(chain, {0, 1});
  CHECK(fb.impossible());
  CHECK(std::isinf(fb.loglik));
  CHECK(fb.loglik < 0);
  CHECK_THROWS_AS(forward_backward(chain, {}), ValidationError);
  CHECK_THROWS_AS(forward_backward(chain, {2}), ValidationError);
}

TEST_CASE("em_fit with one state recovers pooled symbol frequencies") {
  const HmmParams truth = random_hmm(3, 4, 2);
  const Dataset data = sample_sequences(truth, 500, 6, 3);
  std::map<int, double> counts;
  double total = 0;
  for (const auto& s : data.sequences)
    for (int x : s) {
      counts[x] += 1;
      total += 1;
    }
  double expected_ll = 0;
  for (auto& [x, c] : counts) expected_ll += c * std::log(c / total);

  const EmResult fit = em_fit(data, {1, 50, 1e-10, 2, 4});
  for (auto& [x, c] : counts) CHECK(std::abs(fit.params.O(x, 0) - c / total) <= 1e-12);
  // Optimum reached after the first M-step.
  REQUIRE(fit.loglik_trace.size() >= 2);
  CHECK(std::abs(fit.loglik_trace[1] - expected_ll) <= 1e-9 * std::abs(expected_ll));
  CHECK(std::abs(fit.loglik_trace.back() - expected_ll) <= 1e-9 * std::abs(expected_ll));
  CHECK(fit.converged);
}

TEST_CASE("em_fit fits constant sequences exactly") {
  Dataset data;
  data.n = 2;
  data.sequences.assign(20, Sequence{0, 0, 0, 0});
  const EmResult fit = em_fit(data, {2, 200, 1e-6, 3, 9});
  CHECK(fit.loglik_trace.back() >= -1e-6);
}

TEST_CASE("em_fit traces are monotone and outputs are valid") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 12; ++rep) {
    const HmmParams truth = oracle::random_params(rng, 2 + rep % 2, 3);
    const Dataset data = sample_sequences(truth, 200, 5, static_cast<std::uint64_t>(rep));
    const EmResult fit = em_fit(data, {2 + rep % 3, 100, 1e-8, 2, static_cast<std::uint64_t>(rep)});
    for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k)
      CHECK(fit.loglik_trace[k] >= fit.loglik_trace[k - 1] - 1e-9);
    CHECK_NOTHROW(validate_params(fit.params));
    CHECK(fit.restart_logliks.size() == 2);
    CHECK(fit.restart_logliks[static_cast<std::size_t>(fit.best_restart)] == fit.loglik_trace.back());
    CHECK(std::abs(log_likelihood(fit.params, data) - fit.loglik_trace.back()) <= 1e-8 * std::abs(fit.loglik_trace.back()));
  }
}

TEST_CASE("em_fit is deterministic") {
  const HmmParams truth = random_hmm(3, 4, 10);
  const Dataset data = sample_sequences(truth, 300, 6, 1);
  const EmConfig cfg{3, 60, 1e-7, 3, 42};
  const EmResult a = em_fit(data, cfg);
  const EmResult b = em_fit(data, cfg);
  CHECK(a.loglik_trace == b.loglik_trace);
  CHECK(a.params.T == b.params.T);
  CHECK(a.params.O == b.params.O);
  CHECK(a.restart_logliks == b.restart_logliks);
}

TEST_CASE("em_fit preconditions") {
  Dataset empty;
  empty.n = 2;
  CHECK_THROWS_AS(em_fit(empty, {}), ValidationError);
  Dataset data = sample_sequences(random_hmm(2, 2, 1), 10, 3, 1);
  CHECK_THROWS_AS(em_fit(data, {0, 10, 1e-6, 1, 0}), ValidationError);
  CHECK_THROWS_AS(em_fit(data, {2, 0, 1e-6, 1, 0}), ValidationError);
  CHECK_THROWS_AS(em_fit(data, {2, 10, 0.0, 1, 0}), ValidationError);
  CHECK_THROWS_AS(em_fit(data, {2, 10, 1e-6, 0, 0}), ValidationError);
  data.sequences[0][0] = 5;
  CHECK_THROWS_AS(em_fit(data, {}), ValidationError);
}

TEST_CASE("maximize keeps columns with no expected mass") {
  const HmmParams prev = random_hmm(2, 3, 6);
  ExpectedCounts counts(2, 3);
  counts.init << 1, 0;
  counts.trans << 2, 0, 2, 0;
  counts.emit << 1, 0, 1, 0, 2, 0;
  const HmmParams next = maximize(counts, prev);
  CHECK(next.pi == Eigen::Vector2d(1, 0));
  CHECK(next.T.col(0) == Eigen::Vector2d(0.5, 0.5));
  CHECK(next.T.col(1) == prev.T.col(1));
  CHECK(next.O.col(0) == Eigen::Vector3d(0.25, 0.25, 0.5));
  CHECK(next.O.col(1) == prev.O.col(1));
}
