#pragma once

// Discrete hidden Markov models: parameters, sampling, exact inference and
// analytical low-order moments.
//
// Orientation is column-stochastic throughout:
//   pi[i]     = Pr(h_1 = i)
//   T(i, j)   = Pr(h_{t+1} = i | h_t = j)
//   O(x, j)   = Pr(x_t = x | h_t = j)
// Symbols are 0-based inside the library and 1-based in every text format.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace shmm {

using Sequence = std::vector<int>;

inline constexpr double kStochasticTolerance = 1e-9;

struct HmmParams {
  Eigen::VectorXd pi;  // m
  Eigen::MatrixXd T;   // m x m
  Eigen::MatrixXd O;   // n x m

  int num_states() const { return static_cast<int>(pi.size()); }
  int num_symbols() const { return static_cast<int>(O.rows()); }
};

struct Dataset {
  std::vector<Sequence> sequences;
  int n = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return sequences.size(); }
};

struct ExactMoments {
  Eigen::VectorXd P1;                // Pr(x1 = i)
  Eigen::MatrixXd P21;               // (i, j) = Pr(x2 = i, x1 = j)
  std::vector<Eigen::MatrixXd> P3x1; // [x](i, j) = Pr(x3 = i, x2 = x, x1 = j)
};

/// Checks dimensions, non-negativity and column stochasticity (within 1e-9)
/// and returns the parameters unchanged. Throws ValidationError.
HmmParams validate_params(Eigen::VectorXd pi, Eigen::MatrixXd T, Eigen::MatrixXd O);
void validate_params(const HmmParams& params);

/// pi and every column of T and O drawn from a symmetric Dirichlet.
HmmParams random_hmm(int m, int n, std::uint64_t seed, double concentration = 1.0);

/// N independent length-t sequences from the generative process.
Dataset sample_sequences(const HmmParams& params, int count, int length, std::uint64_t seed);

/// Throws ValidationError when a symbol falls outside [0, n).
void check_symbols(const Sequence& seq, int n);

/// Pr(x_1..x_t) by the forward recursion.
double joint_probability_forward(const HmmParams& params, const Sequence& seq);

/// A_x = T diag(O(x, :)).
Eigen::MatrixXd observable_operator(const HmmParams& params, int x);

/// Pr(x_1..x_t) = 1^T A_{x_t} ... A_{x_1} pi, applied right to left.
double joint_probability_operators(const HmmParams& params, const Sequence& seq);

/// Closed-form moments: P1 = O pi, P21 = O T diag(pi) O^T, P3x1 = O A_x T diag(pi) O^T.
ExactMoments exact_moments(const HmmParams& params);

inline constexpr std::size_t kMaxEnumeration = 10'000'000;

/// All n^t sequences of length t in lexicographic order (last symbol fastest).
/// Refuses n^t > 1e7.
std::vector<Sequence> enumerate_sequences(int n, int length);

}  // namespace shmm
