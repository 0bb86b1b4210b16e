#include "shmm/hmm.hpp"

#include <cmath>
#include <string>

#include "shmm/errors.hpp"
#include "shmm/rng.hpp"

namespace shmm {

namespace {

void check_distribution(const Eigen::Ref<const Eigen::VectorXd>& v, const std::string& what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw ValidationError(what + " has a non-finite entry");
    if (v[i] < 0.0) throw ValidationError(what + " has a negative entry");
    if (v[i] > 1.0 + kStochasticTolerance) throw ValidationError(what + " has an entry above 1");
  }
  const double s = v.sum();
  if (std::abs(s - 1.0) > kStochasticTolerance)
    throw ValidationError(what + " is not stochastic (sums to " + std::to_string(s) + ")");
}

}  // namespace

void validate_params(const HmmParams& p) {
  const Eigen::Index m = p.pi.size();
  if (m < 1) throw ValidationError("pi must have at least one state");
  if (p.T.rows() != m || p.T.cols() != m) throw ValidationError("T must be m x m");
  if (p.O.cols() != m) throw ValidationError("O must have m columns");
  if (p.O.rows() < 1) throw ValidationError("O must have at least one row");
  check_distribution(p.pi, "pi");
  for (Eigen::Index j = 0; j < m; ++j) {
    check_distribution(p.T.col(j), "T column " + std::to_string(j + 1));
    check_distribution(p.O.col(j), "O column " + std::to_string(j + 1));
  }
}

HmmParams validate_params(Eigen::VectorXd pi, Eigen::MatrixXd T, Eigen::MatrixXd O) {
  HmmParams p{std::move(pi), std::move(T), std::move(O)};
  validate_params(p);
  return p;
}

HmmParams random_hmm(int m, int n, std::uint64_t seed, double concentration) {
  if (m < 1 || n < 1) throw ValidationError("random_hmm needs m >= 1 and n >= 1");
  if (!(concentration > 0.0)) throw ValidationError("Dirichlet concentration must be positive");
  Rng rng(seed);
  HmmParams p;
  p.pi = sample_dirichlet(rng, m, concentration);
  p.T.resize(m, m);
  p.O.resize(n, m);
  for (int j = 0; j < m; ++j) p.T.col(j) = sample_dirichlet(rng, m, concentration);
  for (int j = 0; j < m; ++j) p.O.col(j) = sample_dirichlet(rng, n, concentration);
  return p;
}

Dataset sample_sequences(const HmmParams& params, int count, int length, std::uint64_t seed) {
  if (count < 1) throw ValidationError("sample count must be >= 1");
  if (length < 1) throw ValidationError("sequence length must be >= 1");
  Rng rng(seed);
  Dataset data;
  data.n = params.num_symbols();
  data.seed = seed;
  data.sequences.resize(static_cast<std::size_t>(count));
  for (auto& seq : data.sequences) {
    seq.resize(static_cast<std::size_t>(length));
    int h = sample_categorical(rng, params.pi);
    for (int t = 0; t < length; ++t) {
      if (t > 0) h = sample_categorical(rng, params.T.col(h));
      seq[static_cast<std::size_t>(t)] = sample_categorical(rng, params.O.col(h));
    }
  }
  return data;
}

void check_symbols(const Sequence& seq, int n) {
  for (int x : seq)
    if (x < 0 || x >= n)
      throw ValidationError("symbol " + std::to_string(x + 1) + " outside [1, " + std::to_string(n) + "]");
}

double joint_probability_forward(const HmmParams& params, const Sequence& seq) {
  check_symbols(seq, params.num_symbols());
  if (seq.empty()) return 1.0;
  Eigen::VectorXd alpha = params.O.row(seq[0]).transpose().cwiseProduct(params.pi);
  for (std::size_t k = 1; k < seq.size(); ++k)
    alpha = params.O.row(seq[k]).transpose().cwiseProduct(params.T * alpha);
  return alpha.sum();
}

Eigen::MatrixXd observable_operator(const HmmParams& params, int x) {
  if (x < 0 || x >= params.num_symbols())
    throw ValidationError("observable_operator: symbol out of range");
  return params.T * params.O.row(x).asDiagonal();
}

double joint_probability_operators(const HmmParams& params, const Sequence& seq) {
  check_symbols(seq, params.num_symbols());
  Eigen::VectorXd state = params.pi;
  for (int x : seq) state = observable_operator(params, x) * state;
  return state.sum();
}

ExactMoments exact_moments(const HmmParams& params) {
  const int n = params.num_symbols();
  ExactMoments mom;
  mom.P1 = params.O * params.pi;
  // T diag(pi) O^T: column j holds Pr(h2 = ., x1 = j).
  const Eigen::MatrixXd h2_x1 = params.T * params.pi.asDiagonal() * params.O.transpose();
  mom.P21 = params.O * h2_x1;
  mom.P3x1.reserve(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) mom.P3x1.push_back(params.O * observable_operator(params, x) * h2_x1);
  return mom;
}

std::vector<Sequence> enumerate_sequences(int n, int length) {
  if (n < 1 || length < 0) throw ValidationError("enumerate_sequences: bad arguments");
  std::size_t total = 1;
  for (int i = 0; i < length; ++i) {
    total *= static_cast<std::size_t>(n);
    if (total > kMaxEnumeration) throw ValidationError("enumerate_sequences: n^t exceeds 1e7");
  }
  std::vector<Sequence> out;
  out.reserve(total);
  Sequence cur(static_cast<std::size_t>(length), 0);
  for (std::size_t k = 0; k < total; ++k) {
    out.push_back(cur);
    for (int pos = length - 1; pos >= 0; --pos) {
      auto& c = cur[static_cast<std::size_t>(pos)];
      if (++c < n) break;
      c = 0;
    }
  }
  return out;
}

}  // namespace shmm
