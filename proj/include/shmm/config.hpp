#pragma once

// Experiment configuration: a flat `key = value` text format.
//
//   # comment
//   experiment_id   = small
//   hmm             = random 4 8 11 1.0      # random <m> <n> <seed> <concentration>
//                                            # or: file <path>
//   train_sizes     = 100, 1000, 10000, 100000
//   rank_values     = 1, 2, 3, 4, 5, 6, 7, 8
//   train_length    = 4                      # 0: same as the test length
//   test            = exhaustive 4           # or: sampled <count> <t> <seed>
//   trials          = 10
//   base_seed       = 2014
//   correction_mode = none                   # none | clamp | signflip+clamp
//   triple_mode     = first                  # first | sliding
//   run_em          = true
//   em_m_hyper      = 0                      # 0: true number of states
//   em_max_iterations = 200
//   em_rel_tolerance  = 1e-6
//   em_restarts     = 5
//   em_seed         = 0
//   record_wall_time = false                 # true breaks byte-identical reruns

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "shmm/em.hpp"
#include "shmm/evaluation.hpp"
#include "shmm/spectral.hpp"

namespace shmm {

struct HmmSource {
  bool from_file = false;
  std::filesystem::path path;
  int m = 4;
  int n = 8;
  std::uint64_t seed = 1;
  double concentration = 1.0;
};

struct TestSpec {
  bool exhaustive = true;
  int count = 0;
  int length = 4;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  HmmSource hmm;
  std::vector<long long> train_sizes{100, 1000, 10000, 100000};
  std::vector<int> rank_values{1, 2, 3, 4, 5, 6, 7, 8};
  int train_length = 0;
  TestSpec test;
  int trials = 10;
  std::uint64_t base_seed = 1;
  CorrectionMode correction_mode = CorrectionMode::kNone;
  TripleMode triple_mode = TripleMode::kFirst;
  bool run_em = true;
  EmConfig em_config{0, 200, 1e-6, 5, 0};
  bool record_wall_time = false;
};

using ConfigEntries = std::map<std::string, std::string>;

/// The recognised keys, in documentation order.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines. Unknown or duplicate keys are errors.
ConfigEntries parse_config_entries(const std::string& text);

/// Applies entries over `base`. Throws ValidationError on bad values.
ExperimentConfig apply_config_entries(const ConfigEntries& entries, ExperimentConfig base = {});

ExperimentConfig load_config(const std::filesystem::path& path);

/// Structural checks that need no model. Throws ValidationError.
void validate_config(const ExperimentConfig& config);

}  // namespace shmm
