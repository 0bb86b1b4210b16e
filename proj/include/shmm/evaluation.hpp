#pragma once

// Test-set metrics and negative-probability corrections.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace shmm {

enum class CorrectionMode { kNone, kClamp, kSignFlipClamp };

CorrectionMode parse_correction_mode(const std::string& text);
std::string to_string(CorrectionMode mode);

/// Sum over test sequences of |true - est|^(1/t).
double normalized_l1(std::span<const double> true_probs, std::span<const double> est_probs, int t);

/// Plain sum of absolute differences. Diagnostic only.
double total_variation_l1(std::span<const double> true_probs, std::span<const double> est_probs);

/// Fraction of strictly negative entries.
double neg_prop(std::span<const double> est_probs);

/// Raises every value below epsilon to epsilon, then divides by the total.
std::vector<double> clamp_normalize(std::span<const double> est_probs, double epsilon);

/// Negates the list when its sum is strictly negative. A zero sum is left alone.
std::vector<double> sign_flip_heuristic(std::span<const double> est_probs);

/// Default clamp floor: 1e-6 of uniform mass over the test set.
double default_clamp_epsilon(std::size_t test_size);

/// Applies the configured correction pipeline over the whole test set.
std::vector<double> apply_correction(std::span<const double> est_probs, CorrectionMode mode);

struct MetricsRecord {
  std::string experiment_id;
  std::string learner;  // spectral | em | true-model
  long long N = 0;
  int m_hyper = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double l1 = 0.0;
  double neg_prop = 0.0;
  double loglik = 0.0;  // -inf marks an impossible test sequence
  double wall_time_ms = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "experiment_id,learner,N,m_hyper,trial,seed,l1,neg_prop,loglik,wall_time_ms";

/// Shortest round-trip decimal for a double; "-inf"/"inf"/"nan" for non-finite values.
std::string format_double(double v);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);

}  // namespace shmm
