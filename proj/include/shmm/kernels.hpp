#pragma once

// Data-parallel kernels. Each kernel has a plain serial reference (`*_serial`)
// kept for testing and benchmarking, and an OpenMP version (`*_parallel`).
//
// Parallel kernels are deterministic regardless of thread count:
//   - element-wise kernels write each output slot exactly once;
//   - integer reductions are exact;
//   - floating-point reductions accumulate fixed-size chunks serially and then
//     combine chunk results in chunk order.

#include <cstddef>
#include <vector>

#include "shmm/em.hpp"
#include "shmm/hmm.hpp"
#include "shmm/likelihood.hpp"
#include "shmm/spectral.hpp"

namespace shmm {

/// Dense n^3 table of (x1, x2, x3) triple counts.
struct TripleCounts {
  int n = 0;
  long long total = 0;
  std::vector<long long> counts;

  TripleCounts() = default;
  explicit TripleCounts(int n_symbols);
  long long& at(int x1, int x2, int x3);
  long long at(int x1, int x2, int x3) const;
};

namespace kernels {

inline constexpr std::size_t kReductionChunk = 256;

TripleCounts count_triples_serial(const std::vector<Sequence>& seqs, int n, TripleMode mode);
TripleCounts count_triples_parallel(const std::vector<Sequence>& seqs, int n, TripleMode mode);

std::vector<double> predict_batch_serial(const ObservableOperators& ops, const std::vector<Sequence>& seqs);
std::vector<double> predict_batch_parallel(const ObservableOperators& ops, const std::vector<Sequence>& seqs);

std::vector<double> forward_batch_serial(const HmmParams& params, const std::vector<Sequence>& seqs);
std::vector<double> forward_batch_parallel(const HmmParams& params, const std::vector<Sequence>& seqs);

/// Per-sequence log-likelihoods from the scaled forward pass.
std::vector<double> loglik_batch_serial(const HmmParams& params, const std::vector<Sequence>& seqs);
std::vector<double> loglik_batch_parallel(const HmmParams& params, const std::vector<Sequence>& seqs);

/// E-step over weighted sequences. weights may be empty (all ones).
ExpectedCounts expected_counts_serial(const HmmParams& params, const std::vector<Sequence>& seqs,
                                      const std::vector<double>& weights);
ExpectedCounts expected_counts_parallel(const HmmParams& params, const std::vector<Sequence>& seqs,
                                        const std::vector<double>& weights);

/// likelihood_at evaluated at each theta; spec.theta is overridden.
std::vector<double> likelihood_grid_serial(const SymmetricHmmSpec& spec, const Sequence& seq,
                                           const std::vector<double>& thetas);
std::vector<double> likelihood_grid_parallel(const SymmetricHmmSpec& spec, const Sequence& seq,
                                             const std::vector<double>& thetas);

}  // namespace kernels
}  // namespace shmm
