#include "shmm/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "shmm/errors.hpp"
#include "shmm/kernels.hpp"
#include "shmm/rng.hpp"

namespace shmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Scaled forward and backward passes. alpha and beta columns are normalized
// so that alpha(:, k) = Pr(h_k | x_1..x_k) and scale[k] = Pr(x_k | x_1..x_{k-1}).
// Returns false when some scale factor is zero.
bool scaled_passes(const HmmParams& p, const Sequence& seq, Eigen::MatrixXd& alpha, Eigen::MatrixXd& beta,
                   Eigen::VectorXd& scale) {
  const int m = p.num_states();
  const auto t = static_cast<Eigen::Index>(seq.size());
  alpha.resize(m, t);
  beta.resize(m, t);
  scale.resize(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    const auto emit = p.O.row(seq[static_cast<std::size_t>(k)]).transpose();
    if (k == 0)
      alpha.col(0) = emit.cwiseProduct(p.pi);
    else
      alpha.col(k) = emit.cwiseProduct(p.T * alpha.col(k - 1));
    scale[k] = alpha.col(k).sum();
    if (!(scale[k] > 0.0)) return false;
    alpha.col(k) /= scale[k];
  }
  beta.col(t - 1).setOnes();
  for (Eigen::Index k = t - 2; k >= 0; --k) {
    const auto emit = p.O.row(seq[static_cast<std::size_t>(k + 1)]).transpose();
    beta.col(k) = p.T.transpose() * emit.cwiseProduct(beta.col(k + 1)) / scale[k + 1];
  }
  return true;
}

void validate_config(const EmConfig& c) {
  if (c.m_hyper < 1) throw ValidationError("em: m_hyper must be >= 1");
  if (c.max_iterations < 1) throw ValidationError("em: max_iterations must be >= 1");
  if (!(c.rel_tolerance > 0.0)) throw ValidationError("em: rel_tolerance must be positive");
  if (c.restarts < 1) throw ValidationError("em: restarts must be >= 1");
}

struct RestartOutcome {
  HmmParams params;
  std::vector<double> trace;
  bool converged = false;
};

RestartOutcome run_restart(const std::vector<Sequence>& seqs, const std::vector<double>& weights, int n,
                           const EmConfig& config, int restart) {
  RestartOutcome out;
  out.params = random_hmm(config.m_hyper, n, derive_seed(config.seed, {static_cast<std::uint64_t>(restart)}), 1.0);
  for (int iteration = 0;; ++iteration) {
    const ExpectedCounts counts = kernels::expected_counts_parallel(out.params, seqs, weights);
    const double ll = counts.impossible > 0 ? kNegInf : counts.loglik;
    out.trace.push_back(ll);
    if (out.trace.size() >= 2) {
      const double prev = out.trace[out.trace.size() - 2];
      const double gain = ll - prev;
      if (prev == 0.0 || (std::isfinite(prev) && gain / std::abs(prev) < config.rel_tolerance)) {
        out.converged = true;
        break;
      }
    }
    if (iteration == config.max_iterations) break;
    out.params = maximize(counts, out.params);
  }
  return out;
}

}  // namespace

bool ForwardBackward::impossible() const { return loglik == kNegInf; }

ExpectedCounts::ExpectedCounts(int m, int n)
    : init(Eigen::VectorXd::Zero(m)), trans(Eigen::MatrixXd::Zero(m, m)), emit(Eigen::MatrixXd::Zero(n, m)) {}

ExpectedCounts& ExpectedCounts::operator+=(const ExpectedCounts& other) {
  init += other.init;
  trans += other.trans;
  emit += other.emit;
  loglik += other.loglik;
  impossible += other.impossible;
  return *this;
}

ForwardBackward forward_backward(const HmmParams& params, const Sequence& seq) {
  check_symbols(seq, params.num_symbols());
  if (seq.empty()) throw ValidationError("forward_backward: empty sequence");
  Eigen::MatrixXd alpha, beta;
  Eigen::VectorXd scale;
  ForwardBackward fb;
  if (!scaled_passes(params, seq, alpha, beta, scale)) {
    fb.loglik = kNegInf;
    return fb;
  }
  fb.loglik = scale.array().log().sum();
  fb.gamma = alpha.cwiseProduct(beta);
  const auto t = static_cast<Eigen::Index>(seq.size());
  fb.xi.reserve(static_cast<std::size_t>(t - 1));
  for (Eigen::Index k = 0; k + 1 < t; ++k) {
    const Eigen::VectorXd next =
        params.O.row(seq[static_cast<std::size_t>(k + 1)]).transpose().cwiseProduct(beta.col(k + 1)) / scale[k + 1];
    fb.xi.push_back(next.asDiagonal() * params.T * alpha.col(k).asDiagonal());
  }
  return fb;
}

void accumulate_expected_counts(const HmmParams& params, const Sequence& seq, double weight, ExpectedCounts& acc) {
  if (seq.empty()) return;
  Eigen::MatrixXd alpha, beta;
  Eigen::VectorXd scale;
  if (!scaled_passes(params, seq, alpha, beta, scale)) {
    ++acc.impossible;
    return;
  }
  acc.loglik += weight * scale.array().log().sum();
  const Eigen::MatrixXd gamma = alpha.cwiseProduct(beta);
  acc.init += weight * gamma.col(0);
  for (std::size_t k = 0; k < seq.size(); ++k)
    acc.emit.row(seq[k]) += weight * gamma.col(static_cast<Eigen::Index>(k)).transpose();
  for (Eigen::Index k = 0; k + 1 < static_cast<Eigen::Index>(seq.size()); ++k) {
    const Eigen::VectorXd next =
        params.O.row(seq[static_cast<std::size_t>(k + 1)]).transpose().cwiseProduct(beta.col(k + 1)) *
        (weight / scale[k + 1]);
    acc.trans.noalias() += next.asDiagonal() * params.T * alpha.col(k).asDiagonal();
  }
}

double log_likelihood(const HmmParams& params, const Dataset& data) {
  const std::vector<double> per_seq = kernels::loglik_batch_parallel(params, data.sequences);
  double total = 0.0;
  for (double v : per_seq) total += v;
  return total;
}

HmmParams maximize(const ExpectedCounts& counts, const HmmParams& previous) {
  HmmParams next = previous;
  const int m = previous.num_states();
  const double init_mass = counts.init.sum();
  if (init_mass > 0.0) next.pi = counts.init / init_mass;
  for (int j = 0; j < m; ++j) {
    const double trans_mass = counts.trans.col(j).sum();
    if (trans_mass > 0.0) next.T.col(j) = counts.trans.col(j) / trans_mass;
    const double emit_mass = counts.emit.col(j).sum();
    if (emit_mass > 0.0) next.O.col(j) = counts.emit.col(j) / emit_mass;
  }
  return next;
}

EmResult em_fit(const Dataset& data, const EmConfig& config) {
  validate_config(config);
  if (data.sequences.empty()) throw ValidationError("em_fit: empty dataset");
  if (data.n < 1) throw ValidationError("em_fit: alphabet size must be positive");

  // Identical sequences share one forward-backward pass, weighted by multiplicity.
  std::map<Sequence, double> multiplicity;
  for (const auto& seq : data.sequences) {
    if (seq.empty()) throw ValidationError("em_fit: empty sequence");
    check_symbols(seq, data.n);
    multiplicity[seq] += 1.0;
  }
  std::vector<Sequence> unique;
  std::vector<double> weights;
  unique.reserve(multiplicity.size());
  weights.reserve(multiplicity.size());
  for (auto& [seq, w] : multiplicity) {
    unique.push_back(seq);
    weights.push_back(w);
  }

  std::vector<RestartOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(config.restarts));
  for (int r = 0; r < config.restarts; ++r) outcomes.push_back(run_restart(unique, weights, data.n, config, r));

  EmResult result;
  int best = 0;
  for (int r = 0; r < config.restarts; ++r) {
    const double ll = outcomes[static_cast<std::size_t>(r)].trace.back();
    result.restart_logliks.push_back(ll);
    if (ll > outcomes[static_cast<std::size_t>(best)].trace.back()) best = r;
  }
  auto& winner = outcomes[static_cast<std::size_t>(best)];
  result.params = std::move(winner.params);
  result.loglik_trace = std::move(winner.trace);
  result.converged = winner.converged;
  result.best_restart = best;
  return result;
}

}  // namespace shmm
