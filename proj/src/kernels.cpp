#include "shmm/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "shmm/errors.hpp"

namespace shmm {

TripleCounts::TripleCounts(int n_symbols)
    : n(n_symbols), counts(static_cast<std::size_t>(n_symbols) * n_symbols * n_symbols, 0) {}

long long& TripleCounts::at(int x1, int x2, int x3) {
  return counts[(static_cast<std::size_t>(x3) * n + x2) * n + x1];
}

long long TripleCounts::at(int x1, int x2, int x3) const {
  return counts[(static_cast<std::size_t>(x3) * n + x2) * n + x1];
}

namespace kernels {

namespace {

void add_triples(const Sequence& seq, TripleMode mode, TripleCounts& out) {
  const std::size_t windows = mode == TripleMode::kFirst ? 1 : seq.size() - 2;
  for (std::size_t k = 0; k < windows; ++k) {
    ++out.at(seq[k], seq[k + 1], seq[k + 2]);
    ++out.total;
  }
}

std::size_t num_chunks(std::size_t items) { return (items + kReductionChunk - 1) / kReductionChunk; }

double weight_of(const std::vector<double>& weights, std::size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

void check_weights(const std::vector<Sequence>& seqs, const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != seqs.size())
    throw ValidationError("expected_counts: weights and sequences differ in length");
}

double scaled_forward_loglik(const HmmParams& params, const Sequence& seq, Eigen::VectorXd& alpha) {
  double ll = 0.0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto emit = params.O.row(seq[k]).transpose();
    if (k == 0)
      alpha = emit.cwiseProduct(params.pi);
    else
      alpha = emit.cwiseProduct(params.T * alpha);
    const double c = alpha.sum();
    if (!(c > 0.0)) return -std::numeric_limits<double>::infinity();
    alpha /= c;
    ll += std::log(c);
  }
  return ll;
}

}  // namespace

TripleCounts count_triples_serial(const std::vector<Sequence>& seqs, int n, TripleMode mode) {
  TripleCounts out(n);
  for (const auto& seq : seqs) add_triples(seq, mode, out);
  return out;
}

TripleCounts count_triples_parallel(const std::vector<Sequence>& seqs, int n, TripleMode mode) {
  TripleCounts out(n);
  const auto size = static_cast<std::ptrdiff_t>(seqs.size());
#pragma omp parallel
  {
    TripleCounts local(n);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < size; ++i) add_triples(seqs[static_cast<std::size_t>(i)], mode, local);
#pragma omp critical
    {
      for (std::size_t k = 0; k < out.counts.size(); ++k) out.counts[k] += local.counts[k];
      out.total += local.total;
    }
  }
  return out;
}

std::vector<double> predict_batch_serial(const ObservableOperators& ops, const std::vector<Sequence>& seqs) {
  std::vector<double> out(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i) out[i] = predict_joint(ops, seqs[i]);
  return out;
}

std::vector<double> predict_batch_parallel(const ObservableOperators& ops, const std::vector<Sequence>& seqs) {
  for (const auto& s : seqs) check_symbols(s, ops.n);
  std::vector<double> out(seqs.size());
  const auto size = static_cast<std::ptrdiff_t>(seqs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) {
    const auto& seq = seqs[static_cast<std::size_t>(i)];
    Eigen::VectorXd state = ops.b1;
    for (int x : seq) state = ops.B[static_cast<std::size_t>(x)] * state;
    out[static_cast<std::size_t>(i)] = ops.b_inf.dot(state);
  }
  return out;
}

std::vector<double> forward_batch_serial(const HmmParams& params, const std::vector<Sequence>& seqs) {
  std::vector<double> out(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i) out[i] = joint_probability_forward(params, seqs[i]);
  return out;
}

std::vector<double> forward_batch_parallel(const HmmParams& params, const std::vector<Sequence>& seqs) {
  for (const auto& s : seqs) check_symbols(s, params.num_symbols());
  std::vector<double> out(seqs.size());
  const auto size = static_cast<std::ptrdiff_t>(seqs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i)
    out[static_cast<std::size_t>(i)] = joint_probability_forward(params, seqs[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<double> loglik_batch_serial(const HmmParams& params, const std::vector<Sequence>& seqs) {
  std::vector<double> out(seqs.size());
  Eigen::VectorXd alpha(params.num_states());
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    check_symbols(seqs[i], params.num_symbols());
    out[i] = scaled_forward_loglik(params, seqs[i], alpha);
  }
  return out;
}

std::vector<double> loglik_batch_parallel(const HmmParams& params, const std::vector<Sequence>& seqs) {
  for (const auto& s : seqs) check_symbols(s, params.num_symbols());
  std::vector<double> out(seqs.size());
  const auto size = static_cast<std::ptrdiff_t>(seqs.size());
#pragma omp parallel
  {
    Eigen::VectorXd alpha(params.num_states());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < size; ++i)
      out[static_cast<std::size_t>(i)] = scaled_forward_loglik(params, seqs[static_cast<std::size_t>(i)], alpha);
  }
  return out;
}

ExpectedCounts expected_counts_serial(const HmmParams& params, const std::vector<Sequence>& seqs,
                                      const std::vector<double>& weights) {
  check_weights(seqs, weights);
  ExpectedCounts acc(params.num_states(), params.num_symbols());
  for (std::size_t i = 0; i < seqs.size(); ++i)
    accumulate_expected_counts(params, seqs[i], weight_of(weights, i), acc);
  return acc;
}

ExpectedCounts expected_counts_parallel(const HmmParams& params, const std::vector<Sequence>& seqs,
                                        const std::vector<double>& weights) {
  check_weights(seqs, weights);
  for (const auto& s : seqs) check_symbols(s, params.num_symbols());
  const int m = params.num_states();
  const int n = params.num_symbols();
  const std::size_t chunks = num_chunks(seqs.size());
  std::vector<ExpectedCounts> partial(chunks, ExpectedCounts(m, n));
  const auto chunk_count = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < chunk_count; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(begin + kReductionChunk, seqs.size());
    for (std::size_t i = begin; i < end; ++i)
      accumulate_expected_counts(params, seqs[i], weight_of(weights, i), partial[static_cast<std::size_t>(c)]);
  }
  ExpectedCounts acc(m, n);
  for (const auto& p : partial) acc += p;
  return acc;
}

std::vector<double> likelihood_grid_serial(const SymmetricHmmSpec& spec, const Sequence& seq,
                                           const std::vector<double>& thetas) {
  std::vector<double> out(thetas.size());
  SymmetricHmmSpec point = spec;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    point.theta = thetas[i];
    out[i] = likelihood_at(point, seq);
  }
  return out;
}

std::vector<double> likelihood_grid_parallel(const SymmetricHmmSpec& spec, const Sequence& seq,
                                             const std::vector<double>& thetas) {
  check_symbols(seq, 2);
  std::vector<double> out(thetas.size());
  const auto size = static_cast<std::ptrdiff_t>(thetas.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) {
    SymmetricHmmSpec point = spec;
    point.theta = thetas[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = likelihood_at(point, seq);
  }
  return out;
}

}  // namespace kernels
}  // namespace shmm
