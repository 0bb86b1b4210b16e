#include "shmm/likelihood.hpp"

#include <cmath>
#include <ostream>

#include "shmm/errors.hpp"
#include "shmm/evaluation.hpp"
#include "shmm/kernels.hpp"
#include "shmm/rng.hpp"

namespace shmm {

namespace {

void check_spec(const SymmetricHmmSpec& spec) {
  if (!(spec.theta >= 0.0 && spec.theta <= 1.0)) throw ValidationError("theta must lie in [0, 1]");
  if (!(spec.emission_correct >= 0.0 && spec.emission_correct <= 1.0))
    throw ValidationError("emission probability must lie in [0, 1]");
  if (spec.initial.minCoeff() < 0.0 || std::abs(spec.initial.sum() - 1.0) > kStochasticTolerance)
    throw ValidationError("initial distribution must be stochastic");
}

}  // namespace

HmmParams symmetric_params(const SymmetricHmmSpec& spec) {
  check_spec(spec);
  HmmParams p;
  p.pi = spec.initial;
  p.T.resize(2, 2);
  p.T << spec.theta, 1.0 - spec.theta, 1.0 - spec.theta, spec.theta;
  const double e = spec.emission_correct;
  p.O.resize(2, 2);
  p.O << e, 1.0 - e, 1.0 - e, e;
  return p;
}

double likelihood_at(const SymmetricHmmSpec& spec, const Sequence& seq) {
  return joint_probability_forward(symmetric_params(spec), seq);
}

std::vector<double> theta_grid(int grid_size) {
  if (grid_size < 2) throw ValidationError("grid_size must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (grid_size - 1);
  return grid;
}

LikelihoodCurve likelihood_curve(const SymmetricHmmSpec& spec_template, const Sequence& seq, int grid_size) {
  check_symbols(seq, 2);
  LikelihoodCurve curve;
  curve.thetas = theta_grid(grid_size);
  curve.values = kernels::likelihood_grid_parallel(spec_template, seq, curve.thetas);
  curve.sequence_length = static_cast<int>(seq.size());
  return curve;
}

int count_unimodal_modes(const std::vector<double>& values) {
  if (values.size() < 3) throw ValidationError("count_unimodal_modes needs at least 3 points");
  std::vector<double> runs;
  for (double v : values)
    if (runs.empty() || v != runs.back()) runs.push_back(v);
  int modes = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const bool above_left = i == 0 || runs[i] > runs[i - 1];
    const bool above_right = i + 1 == runs.size() || runs[i] > runs[i + 1];
    if (above_left && above_right) ++modes;
  }
  return modes;
}

void write_curves_csv(std::ostream& out, const std::vector<LikelihoodCurve>& curves) {
  out << "theta,likelihood,t\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.thetas.size(); ++i)
      out << format_double(c.thetas[i]) << ',' << format_double(c.values[i]) << ',' << c.sequence_length << '\n';
}

std::vector<ConsistencyRow> em_consistency_experiment(const HmmParams& true_params,
                                                      const std::vector<long long>& sample_sizes, int trials,
                                                      const EmConfig& em_config, int sequence_length,
                                                      std::uint64_t base_seed) {
  validate_params(true_params);
  if (true_params.num_states() != 2 || true_params.num_symbols() != 2)
    throw ValidationError("em_consistency_experiment expects a 2-state, 2-symbol model");
  if (sample_sizes.empty()) throw ValidationError("em_consistency_experiment: no sample sizes");
  if (trials < 1) throw ValidationError("em_consistency_experiment: trials must be >= 1");
  std::vector<ConsistencyRow> rows;
  for (long long N : sample_sizes) {
    if (N < 1) throw ValidationError("em_consistency_experiment: sample sizes must be positive");
    for (int trial = 0; trial < trials; ++trial) {
      ConsistencyRow row;
      row.N = N;
      row.trial = trial;
      row.seed = derive_seed(base_seed, {static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(trial)});
      const Dataset data = sample_sequences(true_params, static_cast<int>(N), sequence_length, row.seed);
      EmConfig cfg = em_config;
      cfg.seed = derive_seed(row.seed, {em_config.seed});
      row.em_loglik = em_fit(data, cfg).loglik_trace.back();
      row.true_loglik = log_likelihood(true_params, data);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows) {
  out << "N,trial,seed,em_loglik,true_loglik\n";
  for (const auto& r : rows)
    out << r.N << ',' << r.trial << ',' << r.seed << ',' << format_double(r.em_loglik) << ','
        << format_double(r.true_loglik) << '\n';
}

}  // namespace shmm
