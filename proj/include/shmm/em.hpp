#pragma once

// Baum-Welch with random restarts.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "shmm/hmm.hpp"

namespace shmm {

struct EmConfig {
  int m_hyper = 2;
  int max_iterations = 200;
  double rel_tolerance = 1e-6;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct EmResult {
  HmmParams params;
  std::vector<double> loglik_trace;     // winning restart, one entry per evaluated iterate
  std::vector<double> restart_logliks;  // final log-likelihood of each restart
  bool converged = false;
  int best_restart = 0;
};

struct ForwardBackward {
  Eigen::MatrixXd gamma;            // m x t, column k = Pr(h_k | x_1..x_t)
  std::vector<Eigen::MatrixXd> xi;  // t-1 entries; xi[k](i, j) = Pr(h_{k+1} = i, h_k = j | x)
  double loglik = 0.0;              // -inf marks an impossible sequence
  bool impossible() const;
};

/// Sufficient statistics of one E-step, with transition counts in the
/// column-stochastic orientation: trans(i, j) counts moves j -> i.
struct ExpectedCounts {
  Eigen::VectorXd init;
  Eigen::MatrixXd trans;
  Eigen::MatrixXd emit;  // n x m
  double loglik = 0.0;
  long long impossible = 0;

  ExpectedCounts() = default;
  ExpectedCounts(int m, int n);
  ExpectedCounts& operator+=(const ExpectedCounts& other);
};

/// Scaled forward-backward pass.
ForwardBackward forward_backward(const HmmParams& params, const Sequence& seq);

/// Adds weight * (posterior counts of seq) into acc. Shared by the serial and
/// parallel E-step kernels.
void accumulate_expected_counts(const HmmParams& params, const Sequence& seq, double weight,
                                ExpectedCounts& acc);

/// Total log-likelihood of a dataset, -inf when any sequence is impossible.
double log_likelihood(const HmmParams& params, const Dataset& data);

/// Closed-form M-step. Columns with zero expected mass keep their previous values.
HmmParams maximize(const ExpectedCounts& counts, const HmmParams& previous);

EmResult em_fit(const Dataset& data, const EmConfig& config);

}  // namespace shmm
