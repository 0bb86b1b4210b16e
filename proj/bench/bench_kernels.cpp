// Serial reference vs OpenMP kernels on the small and a mid-size workload.
//
//   bench_kernels [repeats]
//
// Set OMP_NUM_THREADS to control the parallel side.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "shmm/hmm.hpp"
#include "shmm/kernels.hpp"
#include "shmm/likelihood.hpp"
#include "shmm/spectral.hpp"

using namespace shmm;

namespace {

double best_ms(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ms < best) best = ms;
  }
  return best;
}

void row(const std::string& name, int repeats, const std::function<void()>& serial,
         const std::function<void()>& parallel) {
  const double s = best_ms(repeats, serial);
  const double p = best_ms(repeats, parallel);
  std::printf("%-34s %10.3f %10.3f %8.2fx\n", name.c_str(), s, p, s / p);
}

// Keeps results observable so the calls are not elided.
volatile double g_sink = 0.0;

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  std::printf("threads: %d, repeats: %d (best time shown)\n", omp_get_max_threads(), repeats);
  std::printf("%-34s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  const HmmParams small = random_hmm(4, 8, 11);
  const auto test = enumerate_sequences(8, 4);
  const Dataset train = sample_sequences(small, 100000, 4, 3);
  const auto ops = learn_spectral(estimate_moments(train), 4);

  row("count_triples (1e5 seqs, n=8)", repeats,
      [&] { g_sink = static_cast<double>(kernels::count_triples_serial(train.sequences, 8, TripleMode::kSliding).total); },
      [&] { g_sink = static_cast<double>(kernels::count_triples_parallel(train.sequences, 8, TripleMode::kSliding).total); });
  row("predict_batch (4096 x t=4)", repeats, [&] { g_sink = kernels::predict_batch_serial(ops, test)[0]; },
      [&] { g_sink = kernels::predict_batch_parallel(ops, test)[0]; });
  row("forward_batch (4096 x t=4)", repeats, [&] { g_sink = kernels::forward_batch_serial(small, test)[0]; },
      [&] { g_sink = kernels::forward_batch_parallel(small, test)[0]; });
  row("expected_counts (1e5 seqs, m=4)", repeats,
      [&] { g_sink = kernels::expected_counts_serial(small, train.sequences, {}).loglik; },
      [&] { g_sink = kernels::expected_counts_parallel(small, train.sequences, {}).loglik; });

  const HmmParams mid = random_hmm(20, 40, 5);
  const Dataset mid_data = sample_sequences(mid, 5000, 30, 6);
  row("expected_counts (5e3 x t=30, m=20)", repeats,
      [&] { g_sink = kernels::expected_counts_serial(mid, mid_data.sequences, {}).loglik; },
      [&] { g_sink = kernels::expected_counts_parallel(mid, mid_data.sequences, {}).loglik; });
  row("loglik_batch (5e3 x t=30, m=20)", repeats,
      [&] { g_sink = kernels::loglik_batch_serial(mid, mid_data.sequences)[0]; },
      [&] { g_sink = kernels::loglik_batch_parallel(mid, mid_data.sequences)[0]; });

  const Sequence curve_seq = sample_sequences(symmetric_params({0.6, 0.7, {0.5, 0.5}}), 1, 64, 9).sequences[0];
  const auto grid = theta_grid(10001);
  row("likelihood_grid (10001 x t=64)", repeats,
      [&] { g_sink = kernels::likelihood_grid_serial({}, curve_seq, grid)[0]; },
      [&] { g_sink = kernels::likelihood_grid_parallel({}, curve_seq, grid)[0]; });
  return 0;
}
