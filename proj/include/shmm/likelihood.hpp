#pragma once

// Likelihood surfaces of a symmetric two-state HMM with one free parameter,
// and the EM-versus-true-parameters log-likelihood experiment.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "shmm/em.hpp"
#include "shmm/hmm.hpp"

namespace shmm {

/// Two states, two symbols. theta = Pr(h_{t+1} = i | h_t = i);
/// state i emits symbol i with probability emission_correct.
struct SymmetricHmmSpec {
  double theta = 0.5;
  double emission_correct = 0.7;
  Eigen::Vector2d initial{0.5, 0.5};
};

struct LikelihoodCurve {
  std::vector<double> thetas;
  std::vector<double> values;
  int sequence_length = 0;
};

HmmParams symmetric_params(const SymmetricHmmSpec& spec);

/// Pr(x_1..x_t | theta) by forward recursion.
double likelihood_at(const SymmetricHmmSpec& spec, const Sequence& seq);

/// Uniform grid over [0, 1], endpoints included.
std::vector<double> theta_grid(int grid_size);

/// likelihood_at over theta_grid(grid_size); spec.theta is ignored.
LikelihoodCurve likelihood_curve(const SymmetricHmmSpec& spec_template, const Sequence& seq, int grid_size);

/// Local maxima of a sampled curve. Runs of equal values count once and the
/// endpoints are eligible.
int count_unimodal_modes(const std::vector<double>& values);

void write_curves_csv(std::ostream& out, const std::vector<LikelihoodCurve>& curves);

struct ConsistencyRow {
  long long N = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double em_loglik = 0.0;
  double true_loglik = 0.0;
};

/// For each (N, trial): sample N sequences of the given length from
/// true_params, fit EM, and record both training log-likelihoods.
std::vector<ConsistencyRow> em_consistency_experiment(const HmmParams& true_params,
                                                      const std::vector<long long>& sample_sizes, int trials,
                                                      const EmConfig& em_config, int sequence_length,
                                                      std::uint64_t base_seed);

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows);

}  // namespace shmm
