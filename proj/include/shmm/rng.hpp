#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace shmm {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a list of words into a seed. Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

/// Draws one point from a symmetric Dirichlet on the (k-1)-simplex.
inline Eigen::VectorXd sample_dirichlet(Rng& rng, Eigen::Index k, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  Eigen::VectorXd v(k);
  double total = 0.0;
  // Gamma draws can underflow to zero for small concentrations; redraw the whole vector.
  do {
    total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      v[i] = gamma(rng);
      total += v[i];
    }
  } while (!(total > 0.0));
  return v / total;
}

/// Samples an index from a discrete distribution given as a vector of weights summing to one.
inline int sample_categorical(Rng& rng, const Eigen::Ref<const Eigen::VectorXd>& probs) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  const Eigen::Index k = probs.size();
  for (Eigen::Index i = 0; i < k; ++i) {
    u -= probs[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  // Rounding left u slightly positive; fall back to the last index with mass.
  for (Eigen::Index i = k - 1; i >= 0; --i)
    if (probs[i] > 0.0) return static_cast<int>(i);
  return static_cast<int>(k - 1);
}

}  // namespace shmm
