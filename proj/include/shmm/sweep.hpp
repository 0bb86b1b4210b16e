#pragma once

// Grid sweeps over (training size, rank, trial) comparing spectral learning
// with EM on a fixed test set.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "shmm/config.hpp"
#include "shmm/evaluation.hpp"
#include "shmm/hmm.hpp"

namespace shmm {

enum class LearnerStream : std::uint64_t { kSpectral = 0, kEm = 1 };

/// Seed for one cell. Mixes the cell's N, rank value and trial (not their list
/// positions), so inserting new grid values leaves existing cells untouched.
std::uint64_t sweep_cell_seed(std::uint64_t base_seed, long long N, int m_hyper, int trial, LearnerStream learner);

struct TestSet {
  std::vector<Sequence> sequences;
  std::vector<double> true_probs;
  int length = 0;
};

/// Ground-truth model named by the config.
HmmParams resolve_truth(const ExperimentConfig& config);

TestSet build_test_set(const HmmParams& truth, const TestSpec& spec);

/// Evaluates the given learners on every cell; records come back in
/// canonical (N, m_hyper, trial, learner) order.
std::vector<MetricsRecord> run_sweep(const ExperimentConfig& config);

/// run_sweep followed by a CSV write to `csv_path`.
std::vector<MetricsRecord> run_sweep_to_csv(const ExperimentConfig& config, const std::filesystem::path& csv_path);

/// Sum of log(p) over the list; -inf when any p <= 0.
double sum_log(std::span<const double> probs);

}  // namespace shmm
