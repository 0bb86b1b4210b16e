#include "shmm/spectral.hpp"

#include <string>

#include "shmm/errors.hpp"
#include "shmm/kernels.hpp"

namespace shmm {

PseudoInverse pseudo_inverse(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  PseudoInverse out;
  out.matrix = Eigen::MatrixXd::Zero(a.cols(), a.rows());
  if (s.size() == 0 || s[0] <= 0.0) return out;
  const double cutoff = kPinvRelativeCutoff * s[0];
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) {
      inv[i] = 1.0 / s[i];
      ++out.numerical_rank;
    }
  }
  out.matrix = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

MomentEstimates estimate_moments(const Dataset& data, TripleMode mode) {
  if (data.sequences.empty()) throw ValidationError("estimate_moments: empty dataset");
  if (data.n < 1) throw ValidationError("estimate_moments: alphabet size must be positive");
  for (const auto& seq : data.sequences) {
    if (seq.size() < 3) throw ValidationError("estimate_moments: every sequence needs length >= 3");
    check_symbols(seq, data.n);
  }
  const TripleCounts counts = kernels::count_triples_parallel(data.sequences, data.n, mode);
  const int n = data.n;
  const double total = static_cast<double>(counts.total);

  MomentEstimates est;
  est.sample_count = counts.total;
  est.P1_hat = Eigen::VectorXd::Zero(n);
  est.P21_hat = Eigen::MatrixXd::Zero(n, n);
  est.P3x1_hat.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int x3 = 0; x3 < n; ++x3)
    for (int x2 = 0; x2 < n; ++x2)
      for (int x1 = 0; x1 < n; ++x1) {
        const long long c = counts.at(x1, x2, x3);
        if (c == 0) continue;
        const double f = static_cast<double>(c) / total;
        est.P1_hat[x1] += f;
        est.P21_hat(x2, x1) += f;
        est.P3x1_hat[static_cast<std::size_t>(x2)](x3, x1) = f;
      }
  return est;
}

MomentEstimates as_estimates(const ExactMoments& exact) {
  MomentEstimates est;
  est.P1_hat = exact.P1;
  est.P21_hat = exact.P21;
  est.P3x1_hat = exact.P3x1;
  est.sample_count = 1;
  return est;
}

Subspace compute_subspace(const Eigen::Ref<const Eigen::MatrixXd>& P21_hat, int m_hyper) {
  const Eigen::Index n = P21_hat.rows();
  if (P21_hat.cols() != n) throw ValidationError("compute_subspace: P21 must be square");
  if (m_hyper < 1 || m_hyper > n)
    throw ValidationError("compute_subspace: rank " + std::to_string(m_hyper) + " outside [1, " +
                          std::to_string(n) + "]");
  // JacobiSVD returns singular values in decreasing order.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P21_hat, Eigen::ComputeThinU);
  Subspace sub;
  sub.U = svd.matrixU().leftCols(m_hyper);
  sub.singular_values = svd.singularValues().head(m_hyper);
  const double top = svd.singularValues()[0];
  sub.rank_deficient = !(top > 0.0) || sub.singular_values[m_hyper - 1] <= kPinvRelativeCutoff * top;
  return sub;
}

ObservableOperators learn_spectral_with_subspace(const MomentEstimates& moments, const Subspace& subspace) {
  const int n = moments.num_symbols();
  const int m = static_cast<int>(subspace.U.cols());
  if (subspace.U.rows() != n) throw ValidationError("learn_spectral: U must have n rows");
  if (static_cast<int>(moments.P3x1_hat.size()) != n) throw ValidationError("learn_spectral: need n P3x1 matrices");

  const Eigen::MatrixXd Ut = subspace.U.transpose();
  const Eigen::MatrixXd projected = Ut * moments.P21_hat;  // m x n
  const PseudoInverse pinv = pseudo_inverse(projected);     // n x m

  ObservableOperators ops;
  ops.m_hyper = m;
  ops.n = n;
  ops.U = subspace.U;
  ops.singular_values = subspace.singular_values;
  ops.rank_deficient = subspace.rank_deficient || pinv.numerical_rank < m;
  ops.b1 = Ut * moments.P1_hat;
  ops.b_inf = pinv.matrix.transpose() * moments.P1_hat;
  ops.B.reserve(static_cast<std::size_t>(n));
  for (const auto& P3 : moments.P3x1_hat) ops.B.push_back(Ut * P3 * pinv.matrix);
  return ops;
}

ObservableOperators learn_spectral(const MomentEstimates& moments, int m_hyper) {
  const int n = moments.num_symbols();
  if (m_hyper < 1 || m_hyper > n)
    throw ValidationError("learn_spectral: rank " + std::to_string(m_hyper) + " outside [1, " +
                          std::to_string(n) + "]");
  return learn_spectral_with_subspace(moments, compute_subspace(moments.P21_hat, m_hyper));
}

double predict_joint(const ObservableOperators& ops, const Sequence& seq) {
  check_symbols(seq, ops.n);
  Eigen::VectorXd state = ops.b1;
  for (int x : seq) state = ops.B[static_cast<std::size_t>(x)] * state;
  return ops.b_inf.dot(state);
}

}  // namespace shmm
