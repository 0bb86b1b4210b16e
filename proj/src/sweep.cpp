#include "shmm/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "shmm/em.hpp"
#include "shmm/errors.hpp"
#include "shmm/io.hpp"
#include "shmm/kernels.hpp"
#include "shmm/rng.hpp"
#include "shmm/spectral.hpp"

namespace shmm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct CellContext {
  const ExperimentConfig& config;
  const HmmParams& truth;
  const TestSet& test;
  int train_length;
};

MetricsRecord spectral_cell(const CellContext& ctx, long long N, int m_hyper, int trial) {
  MetricsRecord rec;
  rec.experiment_id = ctx.config.experiment_id;
  rec.learner = "spectral";
  rec.N = N;
  rec.m_hyper = m_hyper;
  rec.trial = trial;
  rec.seed = sweep_cell_seed(ctx.config.base_seed, N, m_hyper, trial, LearnerStream::kSpectral);

  const auto start = Clock::now();
  const Dataset train = sample_sequences(ctx.truth, static_cast<int>(N), ctx.train_length, rec.seed);
  const ObservableOperators ops = learn_spectral(estimate_moments(train, ctx.config.triple_mode), m_hyper);
  const std::vector<double> raw = kernels::predict_batch_parallel(ops, ctx.test.sequences);
  if (ctx.config.record_wall_time) rec.wall_time_ms = elapsed_ms(start);

  // neg_prop always sees the uncorrected outputs.
  rec.neg_prop = neg_prop(raw);
  const std::vector<double> est = apply_correction(raw, ctx.config.correction_mode);
  rec.l1 = normalized_l1(ctx.test.true_probs, est, ctx.test.length);
  rec.loglik = sum_log(est);
  return rec;
}

MetricsRecord em_cell(const CellContext& ctx, long long N, int m_hyper, int trial) {
  MetricsRecord rec;
  rec.experiment_id = ctx.config.experiment_id;
  rec.learner = "em";
  rec.N = N;
  rec.m_hyper = m_hyper;
  rec.trial = trial;
  rec.seed = sweep_cell_seed(ctx.config.base_seed, N, m_hyper, trial, LearnerStream::kEm);

  const auto start = Clock::now();
  const Dataset train = sample_sequences(ctx.truth, static_cast<int>(N), ctx.train_length, rec.seed);
  EmConfig em = ctx.config.em_config;
  em.m_hyper = m_hyper;
  em.seed = derive_seed(rec.seed, {ctx.config.em_config.seed});
  const EmResult fit = em_fit(train, em);
  const std::vector<double> est = kernels::forward_batch_parallel(fit.params, ctx.test.sequences);
  if (ctx.config.record_wall_time) rec.wall_time_ms = elapsed_ms(start);

  rec.neg_prop = neg_prop(est);
  rec.l1 = normalized_l1(ctx.test.true_probs, est, ctx.test.length);
  const std::vector<double> test_ll = kernels::loglik_batch_parallel(fit.params, ctx.test.sequences);
  rec.loglik = 0.0;
  for (double v : test_ll) rec.loglik += v;
  return rec;
}

int learner_rank(const std::string& learner) {
  if (learner == "spectral") return 0;
  if (learner == "em") return 1;
  return 2;
}

}  // namespace

std::uint64_t sweep_cell_seed(std::uint64_t base_seed, long long N, int m_hyper, int trial, LearnerStream learner) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(m_hyper),
                                 static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(learner)});
}

double sum_log(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    total += std::log(p);
  }
  return total;
}

HmmParams resolve_truth(const ExperimentConfig& config) {
  if (config.hmm.from_file) return load_hmm(config.hmm.path);
  return random_hmm(config.hmm.m, config.hmm.n, config.hmm.seed, config.hmm.concentration);
}

TestSet build_test_set(const HmmParams& truth, const TestSpec& spec) {
  TestSet test;
  test.length = spec.length;
  if (spec.exhaustive) {
    test.sequences = enumerate_sequences(truth.num_symbols(), spec.length);
  } else {
    test.sequences = sample_sequences(truth, spec.count, spec.length, spec.seed).sequences;
  }
  test.true_probs = kernels::forward_batch_parallel(truth, test.sequences);
  return test;
}

std::vector<MetricsRecord> run_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const HmmParams truth = resolve_truth(config);
  const int n = truth.num_symbols();
  for (int r : config.rank_values)
    if (r > n)
      throw ValidationError("rank value " + std::to_string(r) + " exceeds the alphabet size " + std::to_string(n));
  const int em_states = config.em_config.m_hyper == 0 ? truth.num_states() : config.em_config.m_hyper;

  const TestSet test = build_test_set(truth, config.test);
  const CellContext ctx{config, truth, test, config.train_length == 0 ? config.test.length : config.train_length};

  std::vector<MetricsRecord> records;
  for (long long N : config.train_sizes) {
    for (int trial = 0; trial < config.trials; ++trial) {
      for (int r : config.rank_values) records.push_back(spectral_cell(ctx, N, r, trial));
      if (config.run_em) records.push_back(em_cell(ctx, N, em_states, trial));
    }
  }

  std::stable_sort(records.begin(), records.end(), [&](const MetricsRecord& a, const MetricsRecord& b) {
    const auto index_of = [&](long long N) {
      return std::find(config.train_sizes.begin(), config.train_sizes.end(), N) - config.train_sizes.begin();
    };
    return std::make_tuple(index_of(a.N), a.m_hyper, a.trial, learner_rank(a.learner)) <
           std::make_tuple(index_of(b.N), b.m_hyper, b.trial, learner_rank(b.learner));
  });
  return records;
}

std::vector<MetricsRecord> run_sweep_to_csv(const ExperimentConfig& config, const std::filesystem::path& csv_path) {
  auto records = run_sweep(config);
  std::ostringstream buf;
  write_metrics_csv(buf, records);
  write_text_file(csv_path, buf.str());
  return records;
}

}  // namespace shmm
