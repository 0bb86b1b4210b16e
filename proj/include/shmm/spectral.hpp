#pragma once

// Spectral learning of observable-operator representations from
// low-order empirical moments.

#include <vector>

#include <Eigen/Dense>

#include "shmm/hmm.hpp"

namespace shmm {

/// Relative singular-value cutoff for pseudo-inverses and rank diagnostics.
inline constexpr double kPinvRelativeCutoff = 1e-10;

enum class TripleMode {
  kFirst,    // one triple per sequence: (x1, x2, x3)
  kSliding,  // every consecutive window; assumes stationarity
};

struct MomentEstimates {
  Eigen::VectorXd P1_hat;
  Eigen::MatrixXd P21_hat;
  std::vector<Eigen::MatrixXd> P3x1_hat;
  long long sample_count = 0;

  int num_symbols() const { return static_cast<int>(P1_hat.size()); }
};

struct Subspace {
  Eigen::MatrixXd U;                // n x m_hyper, orthonormal columns
  Eigen::VectorXd singular_values;  // the m_hyper largest, descending
  bool rank_deficient = false;      // some retained value below the relative cutoff
};

struct ObservableOperators {
  int m_hyper = 0;
  int n = 0;
  Eigen::MatrixXd U;
  Eigen::VectorXd b1;
  Eigen::VectorXd b_inf;
  std::vector<Eigen::MatrixXd> B;
  Eigen::VectorXd singular_values;
  bool rank_deficient = false;
};

struct PseudoInverse {
  Eigen::MatrixXd matrix;
  int numerical_rank = 0;
};

/// Moore-Penrose pseudo-inverse through an SVD, dropping singular values
/// below kPinvRelativeCutoff times the largest.
PseudoInverse pseudo_inverse(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Empirical P1, P21, P3x1 from raw triple counts.
MomentEstimates estimate_moments(const Dataset& data, TripleMode mode = TripleMode::kFirst);

/// Converts exact moments (from the generating model) into the estimate type.
MomentEstimates as_estimates(const ExactMoments& exact);

/// Top m_hyper left singular vectors of P21_hat.
Subspace compute_subspace(const Eigen::Ref<const Eigen::MatrixXd>& P21_hat, int m_hyper);

/// b1 = U^T P1, b_inf^T = P1^T (U^T P21)^+, B_x = U^T P3x1 (U^T P21)^+.
ObservableOperators learn_spectral(const MomentEstimates& moments, int m_hyper);

/// Same construction with a caller-supplied U (orthonormal columns, n x m_hyper).
ObservableOperators learn_spectral_with_subspace(const MomentEstimates& moments, const Subspace& subspace);

/// b_inf^T B_{x_t} ... B_{x_1} b1. Not a probability: may be negative or exceed one.
double predict_joint(const ObservableOperators& ops, const Sequence& seq);

}  // namespace shmm
