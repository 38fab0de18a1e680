#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ringshift/ring_image.hpp"

namespace ringshift {

/// Occurrence count of every gray level 0..n-1.
struct Histogram {
  Modulus modulus{256};
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double probability(std::uint64_t level) const {
    return static_cast<double>(counts[level]) / static_cast<double>(total);
  }

  /// Number of gray levels that actually occur.
  std::size_t occupied_levels() const {
    return static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c != 0; }));
  }
};

/// Shannon entropy in bits (log base 2).
struct EntropyValue {
  double bits = 0.0;

  friend constexpr auto operator<=>(EntropyValue, EntropyValue) = default;
};

template <typename Pixel>
Histogram histogram(const BasicRingImage<Pixel>& a) {
  // BasicRingImage cannot be empty, but a moved-from one could be.
  if (a.size() == 0) {
    throw DomainError("histogram of an empty image");
  }
  Histogram h{a.modulus(), std::vector<std::uint64_t>(a.modulus().value(), 0),
              static_cast<std::uint64_t>(a.size())};
  const Pixel* data = a.pixels().data();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    ++h.counts[data[i]];
  }
  return h;
}

/// Entropy of a histogram.
///
/// The sum runs over the sorted multiset of nonzero counts, so the result is a
/// function of that multiset alone: any relabelling of gray levels (a scalar
/// shift, negation) gives a bit-identical value. A single occupied level gives
/// exactly 0.
inline EntropyValue entropy(const Histogram& h) {
  if (h.total == 0) {
    throw DomainError("entropy of an empty histogram");
  }
  std::vector<std::uint64_t> occupied;
  occupied.reserve(h.counts.size());
  std::copy_if(h.counts.begin(), h.counts.end(), std::back_inserter(occupied),
               [](std::uint64_t c) { return c != 0; });
  std::sort(occupied.begin(), occupied.end());

  const double total = static_cast<double>(h.total);
  double bits = 0.0;
  for (const std::uint64_t c : occupied) {
    const double p = static_cast<double>(c) / total;
    bits -= p * std::log2(p);
  }
  // Rounding can push a uniform histogram a hair past the bound.
  return EntropyValue{std::clamp(bits, 0.0, std::log2(static_cast<double>(h.modulus.value())))};
}

template <typename Pixel>
EntropyValue entropy(const BasicRingImage<Pixel>& a) {
  return entropy(histogram(a));
}

/// Absolute entropy difference |E(a) - E(b)|. Shapes may differ; the rings may not.
template <typename Pixel>
double nu(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  if (a.modulus() != b.modulus()) {
    throw ModulusError("nu: modulus mismatch " + std::to_string(a.modulus().value()) + " vs " +
                       std::to_string(b.modulus().value()));
  }
  return std::abs(entropy(a).bits - entropy(b).bits);
}

/// Natural entropy distance E(a + (-b)). Requires pixel-aligned operands.
template <typename Pixel>
double nu_hat(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  return entropy(ring_sub(a, b)).bits;
}

/// Equal entropies up to tol; tol = 0 is the exact relation.
template <typename Pixel>
bool weakly_equivalent(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b,
                       double tol = 0.0) {
  if (tol < 0.0) {
    throw DomainError("weakly_equivalent: negative tolerance");
  }
  return nu(a, b) <= tol;
}

/// The scalar s with a = s + b, if one exists. Decided on the histogram of the
/// difference (a single occupied level), never on a floating-point entropy.
template <typename Pixel>
std::optional<ScalarImageWitness> strongly_equivalent(const BasicRingImage<Pixel>& a,
                                                      const BasicRingImage<Pixel>& b) {
  return is_scalar(ring_sub(a, b));
}

} // namespace ringshift
