#include "shmm/evaluation.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "shmm/errors.hpp"

namespace shmm {

CorrectionMode parse_correction_mode(const std::string& text) {
  if (text == "none") return CorrectionMode::kNone;
  if (text == "clamp") return CorrectionMode::kClamp;
  if (text == "signflip+clamp") return CorrectionMode::kSignFlipClamp;
  throw ValidationError("unknown correction mode '" + text + "' (none | clamp | signflip+clamp)");
}

std::string to_string(CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::kNone: return "none";
    case CorrectionMode::kClamp: return "clamp";
    case CorrectionMode::kSignFlipClamp: return "signflip+clamp";
  }
  return "none";
}

double normalized_l1(std::span<const double> true_probs, std::span<const double> est_probs, int t) {
  if (true_probs.size() != est_probs.size()) throw ValidationError("normalized_l1: length mismatch");
  if (t < 1) throw ValidationError("normalized_l1: t must be >= 1");
  const double exponent = 1.0 / static_cast<double>(t);
  double total = 0.0;
  for (std::size_t i = 0; i < true_probs.size(); ++i)
    total += std::pow(std::abs(true_probs[i] - est_probs[i]), exponent);
  return total;
}

double total_variation_l1(std::span<const double> true_probs, std::span<const double> est_probs) {
  if (true_probs.size() != est_probs.size()) throw ValidationError("total_variation_l1: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < true_probs.size(); ++i) total += std::abs(true_probs[i] - est_probs[i]);
  return total;
}

double neg_prop(std::span<const double> est_probs) {
  if (est_probs.empty()) throw ValidationError("neg_prop: empty list");
  std::size_t negatives = 0;
  for (double v : est_probs)
    if (v < 0.0) ++negatives;
  return static_cast<double>(negatives) / static_cast<double>(est_probs.size());
}

std::vector<double> clamp_normalize(std::span<const double> est_probs, double epsilon) {
  if (est_probs.empty()) throw ValidationError("clamp_normalize: empty list");
  if (!(epsilon > 0.0)) throw ValidationError("clamp_normalize: epsilon must be positive");
  std::vector<double> out(est_probs.begin(), est_probs.end());
  double total = 0.0;
  for (double& v : out) {
    if (!(v >= epsilon)) v = epsilon;  // also catches NaN
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> sign_flip_heuristic(std::span<const double> est_probs) {
  if (est_probs.empty()) throw ValidationError("sign_flip_heuristic: empty list");
  std::vector<double> out(est_probs.begin(), est_probs.end());
  double total = 0.0;
  for (double v : out) total += v;
  if (total < 0.0)
    for (double& v : out) v = -v;
  return out;
}

double default_clamp_epsilon(std::size_t test_size) {
  if (test_size == 0) throw ValidationError("default_clamp_epsilon: empty test set");
  return 1e-6 / static_cast<double>(test_size);
}

std::vector<double> apply_correction(std::span<const double> est_probs, CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::kNone:
      return {est_probs.begin(), est_probs.end()};
    case CorrectionMode::kClamp:
      return clamp_normalize(est_probs, default_clamp_epsilon(est_probs.size()));
    case CorrectionMode::kSignFlipClamp: {
      const auto flipped = sign_flip_heuristic(est_probs);
      return clamp_normalize(flipped, default_clamp_epsilon(est_probs.size()));
    }
  }
  return {est_probs.begin(), est_probs.end()};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("metrics csv: bad number '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("metrics csv: bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    out << r.experiment_id << ',' << r.learner << ',' << r.N << ',' << r.m_hyper << ',' << r.trial << ','
        << r.seed << ',' << format_double(r.l1) << ',' << format_double(r.neg_prop) << ','
        << format_double(r.loglik) << ',' << format_double(r.wall_time_ms) << '\n';
  }
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("metrics csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw ValidationError("metrics csv: unexpected columns '" + line + "'");
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw ValidationError("metrics csv: expected 10 fields, got " + std::to_string(f.size()));
    MetricsRecord r;
    r.experiment_id = f[0];
    r.learner = f[1];
    r.N = parse_int<long long>(f[2]);
    r.m_hyper = parse_int<int>(f[3]);
    r.trial = parse_int<int>(f[4]);
    r.seed = parse_int<std::uint64_t>(f[5]);
    r.l1 = parse_double(f[6]);
    r.neg_prop = parse_double(f[7]);
    r.loglik = parse_double(f[8]);
    r.wall_time_ms = parse_double(f[9]);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace shmm
