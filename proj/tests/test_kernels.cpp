#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "shmm/kernels.hpp"

using namespace shmm;

namespace {

struct Fixture {
  HmmParams params = random_hmm(4, 6, 3);
  std::vector<Sequence> seqs;
  Fixture() {
    seqs = sample_sequences(params, 3000, 5, 9).sequences;
    // A few ragged ones.
    auto extra = sample_sequences(params, 40, 9, 10).sequences;
    seqs.insert(seqs.end(), extra.begin(), extra.end());
  }
};

// Runs fn once per thread count and returns the results.
template <typename Fn>
auto across_threads(Fn&& fn) {
  std::vector<decltype(fn())> out;
  for (int threads : {1, 2, 3, 7}) {
    omp_set_num_threads(threads);
    out.push_back(fn());
  }
  omp_set_num_threads(omp_get_num_procs());
  return out;
}

}  // namespace

TEST_CASE("triple counting: parallel equals serial") {
  Fixture f;
  for (TripleMode mode : {TripleMode::kFirst, TripleMode::kSliding}) {
    const TripleCounts ref = kernels::count_triples_serial(f.seqs, 6, mode);
    for (const auto& got : across_threads([&] { return kernels::count_triples_parallel(f.seqs, 6, mode); })) {
      CHECK(got.total == ref.total);
      CHECK(got.counts == ref.counts);
    }
  }
  const TripleCounts first = kernels::count_triples_serial(f.seqs, 6, TripleMode::kFirst);
  CHECK(first.total == static_cast<long long>(f.seqs.size()));
  const TripleCounts single = kernels::count_triples_serial({{1, 0, 2}}, 3, TripleMode::kFirst);
  CHECK(single.at(1, 0, 2) == 1);
}

TEST_CASE("element-wise kernels: parallel equals serial bit for bit") {
  Fixture f;
  const auto ops = learn_spectral(estimate_moments(Dataset{f.seqs, 6, 0}), 3);
  const auto pred = kernels::predict_batch_serial(ops, f.seqs);
  for (const auto& got : across_threads([&] { return kernels::predict_batch_parallel(ops, f.seqs); }))
    CHECK(got == pred);

  const auto fwd = kernels::forward_batch_serial(f.params, f.seqs);
  for (const auto& got : across_threads([&] { return kernels::forward_batch_parallel(f.params, f.seqs); }))
    CHECK(got == fwd);
  for (std::size_t i = 0; i < 50; ++i) CHECK(fwd[i] == joint_probability_forward(f.params, f.seqs[i]));

  const auto ll = kernels::loglik_batch_serial(f.params, f.seqs);
  for (const auto& got : across_threads([&] { return kernels::loglik_batch_parallel(f.params, f.seqs); }))
    CHECK(got == ll);
  for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(std::exp(ll[i]) - fwd[i]) <= 1e-10 * fwd[i]);

  const SymmetricHmmSpec spec;
  const auto thetas = theta_grid(257);
  const Sequence s{0, 1, 1, 0, 0, 0, 1};
  const auto grid = kernels::likelihood_grid_serial(spec, s, thetas);
  for (const auto& got : across_threads([&] { return kernels::likelihood_grid_parallel(spec, s, thetas); }))
    CHECK(got == grid);
}

TEST_CASE("expected counts: parallel is thread-count independent and matches serial") {
  Fixture f;
  std::vector<double> weights(f.seqs.size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 + static_cast<double>(i % 3);
  const ExpectedCounts ref = kernels::expected_counts_serial(f.params, f.seqs, weights);
  const auto runs = across_threads([&] { return kernels::expected_counts_parallel(f.params, f.seqs, weights); });
  for (const auto& got : runs) {
    CHECK(got.init == runs[0].init);
    CHECK(got.trans == runs[0].trans);
    CHECK(got.emit == runs[0].emit);
    CHECK(got.loglik == runs[0].loglik);
    // Chunked summation differs from the serial order only by rounding.
    CHECK((got.trans - ref.trans).cwiseAbs().maxCoeff() <= 1e-9 * ref.trans.cwiseAbs().maxCoeff());
    CHECK((got.emit - ref.emit).cwiseAbs().maxCoeff() <= 1e-9 * ref.emit.cwiseAbs().maxCoeff());
    CHECK(std::abs(got.loglik - ref.loglik) <= 1e-9 * std::abs(ref.loglik));
  }
  double total_weight = 0;
  for (double w : weights) total_weight += w;
  CHECK(std::abs(ref.init.sum() - total_weight) <= 1e-8);

  ExpectedCounts manual(4, 6);
  for (std::size_t i = 0; i < f.seqs.size(); ++i) accumulate_expected_counts(f.params, f.seqs[i], weights[i], manual);
  CHECK((manual.emit - ref.emit).cwiseAbs().maxCoeff() <= 1e-9 * ref.emit.cwiseAbs().maxCoeff());

  const ExpectedCounts unweighted = kernels::expected_counts_serial(f.params, f.seqs, {});
  CHECK(std::abs(unweighted.init.sum() - static_cast<double>(f.seqs.size())) <= 1e-8);
}
