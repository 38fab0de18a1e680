#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ringshift/entropy.hpp"
#include "ringshift/ring_image.hpp"

namespace ringshift {

/// Bandwidths and per-pixel convergence controls of the joint spatial-range
/// filter. Defaults are the published experimental settings (hs = 15, hr = 12).
struct MeanShiftParams {
  double hs = 15.0;            ///< spatial radius, pixels
  double hr = 12.0;            ///< range radius, gray levels
  double pixel_tol = 0.01;     ///< stop when the joint (dx, dy, dv) shift is shorter
  int pixel_max_iters = 100;   ///< cap on mode-seeking steps per pixel

  void validate() const {
    if (!(hs > 0.0)) throw DomainError("hs must be positive");
    if (!(hr >= 0.0)) throw DomainError("hr must be non-negative");
    if (!(pixel_tol > 0.0)) throw DomainError("pixel_tol must be positive");
    if (pixel_max_iters < 1) throw DomainError("pixel_max_iters must be at least 1");
  }

  friend bool operator==(const MeanShiftParams&, const MeanShiftParams&) = default;
};

enum class StoppingRule {
  EntropyDiff,         ///< |E(A_k) - E(A_{k-1})| <= epsilon
  RingEntropyDistance, ///< E(A_k + (-A_{k-1})) <= epsilon
};

inline std::string_view to_string(StoppingRule rule) {
  return rule == StoppingRule::EntropyDiff ? "entropy-diff" : "ring-entropy-distance";
}

struct CriterionConfig {
  StoppingRule kind = StoppingRule::RingEntropyDistance;
  double epsilon = 0.9;
  int max_outer_iters = 50;

  /// Published thresholds: 0.9 for the ring distance, 0.0175 for the entropy difference.
  static constexpr double default_epsilon(StoppingRule rule) {
    return rule == StoppingRule::RingEntropyDistance ? 0.9 : 0.0175;
  }

  static CriterionConfig defaults_for(StoppingRule rule) {
    return CriterionConfig{rule, default_epsilon(rule), 50};
  }

  void validate() const {
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
    if (max_outer_iters < 1) throw DomainError("max_outer_iters must be at least 1");
  }

  friend bool operator==(const CriterionConfig&, const CriterionConfig&) = default;
};

enum class StopReason { ThresholdMet, MaxItersReached };

inline std::string_view to_string(StopReason reason) {
  return reason == StopReason::ThresholdMet ? "ThresholdMet" : "MaxItersReached";
}

struct TraceEntry {
  int k = 0;
  double criterion_value = 0.0;
  double entropy_after = 0.0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct IterationTrace {
  std::vector<TraceEntry> entries;
  StopReason stopped_reason = StopReason::MaxItersReached;

  friend bool operator==(const IterationTrace&, const IterationTrace&) = default;
};

template <typename Pixel>
struct BasicSegmentationResult {
  BasicRingImage<Pixel> final_image;
  IterationTrace trace;
  MeanShiftParams params;
  CriterionConfig criterion;
  /// A_0 .. A_K when requested, otherwise empty.
  std::vector<BasicRingImage<Pixel>> iterates;
};

using SegmentationResult = BasicSegmentationResult<std::uint16_t>;

enum class KeepIterates : bool { No = false, Yes = true };

namespace detail {

// Mode seeking for one start point (x0, y0, v0) over the immutable source
// grid. Window sums are accumulated in integers, so every mean is the correctly
// rounded quotient of exact sums.
template <typename Pixel>
double seek_range_mode(const typename BasicRingImage<Pixel>::Pixels& src, Eigen::Index x0,
                       Eigen::Index y0, const MeanShiftParams& p) {
  const Eigen::Index w = src.cols();
  const Eigen::Index h = src.rows();
  const double hs2 = p.hs * p.hs;
  const double tol2 = p.pixel_tol * p.pixel_tol;

  double cx = static_cast<double>(x0);
  double cy = static_cast<double>(y0);
  double cv = static_cast<double>(src(y0, x0));

  for (int it = 0; it < p.pixel_max_iters; ++it) {
    const Eigen::Index xlo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(cx - p.hs)));
    const Eigen::Index xhi = std::min<Eigen::Index>(w - 1, static_cast<Eigen::Index>(std::floor(cx + p.hs)));
    const Eigen::Index ylo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(cy - p.hs)));
    const Eigen::Index yhi = std::min<Eigen::Index>(h - 1, static_cast<Eigen::Index>(std::floor(cy + p.hs)));

    std::int64_t count = 0;
    std::int64_t sx = 0;
    std::int64_t sy = 0;
    std::int64_t sv = 0;
    for (Eigen::Index y = ylo; y <= yhi; ++y) {
      const double dy = static_cast<double>(y) - cy;
      const double dy2 = dy * dy;
      for (Eigen::Index x = xlo; x <= xhi; ++x) {
        const double dx = static_cast<double>(x) - cx;
        if (dx * dx + dy2 > hs2) continue;
        const Pixel v = src(y, x);
        if (std::abs(static_cast<double>(v) - cv) > p.hr) continue;
        ++count;
        sx += x;
        sy += y;
        sv += v;
      }
    }
    if (count == 0) break;

    const double n = static_cast<double>(count);
    const double nx = static_cast<double>(sx) / n;
    const double ny = static_cast<double>(sy) / n;
    const double nv = static_cast<double>(sv) / n;
    const double shift2 = (nx - cx) * (nx - cx) + (ny - cy) * (ny - cy) + (nv - cv) * (nv - cv);
    cx = nx;
    cy = ny;
    cv = nv;
    if (shift2 < tol2) break;
  }
  return cv;
}

} // namespace detail

/// One full mean-shift filtering pass with a uniform kernel.
///
/// Every pixel seeks its mode in the joint (x, y, value) domain: the window is
/// a Euclidean disc of radius hs clipped at the borders, intersected with the
/// pixels whose plain-integer value is within hr of the current range estimate.
/// The converged range value is rounded half-up and clamped into [0, n).
template <typename Pixel>
BasicRingImage<Pixel> mean_shift_filter_pass(const BasicRingImage<Pixel>& a,
                                             const MeanShiftParams& p) {
  p.validate();
  const auto& src = a.pixels();
  const double top = static_cast<double>(a.modulus().max_residue());
  typename BasicRingImage<Pixel>::Pixels out(a.height(), a.width());
  for (Eigen::Index y = 0; y < a.height(); ++y) {
    for (Eigen::Index x = 0; x < a.width(); ++x) {
      const double mode = detail::seek_range_mode<Pixel>(src, x, y, p);
      out(y, x) = static_cast<Pixel>(std::clamp(std::floor(mode + 0.5), 0.0, top));
    }
  }
  return {std::move(out), a.modulus(), typename BasicRingImage<Pixel>::Unchecked{}};
}

/// Value of the chosen stopping rule between consecutive iterates.
template <typename Pixel>
double criterion_value(StoppingRule kind, const BasicRingImage<Pixel>& current,
                       const BasicRingImage<Pixel>& previous) {
  detail::require_same_ring(current, previous, "criterion_value");
  return kind == StoppingRule::EntropyDiff ? nu(current, previous) : nu_hat(current, previous);
}

/// Repeats filtering passes until the stopping rule falls to epsilon or the
/// outer cap is hit. At least one pass always runs.
template <typename Pixel>
BasicSegmentationResult<Pixel> segment(const BasicRingImage<Pixel>& a, const MeanShiftParams& p,
                                       const CriterionConfig& c,
                                       KeepIterates keep = KeepIterates::No) {
  p.validate();
  c.validate();

  BasicSegmentationResult<Pixel> result{a, {}, p, c, {}};
  if (keep == KeepIterates::Yes) result.iterates.push_back(a);

  BasicRingImage<Pixel> previous = a;
  for (int k = 1;; ++k) {
    BasicRingImage<Pixel> current = mean_shift_filter_pass(previous, p);
    const double value = criterion_value(c.kind, current, previous);
    result.trace.entries.push_back({k, value, entropy(current).bits});
    if (keep == KeepIterates::Yes) result.iterates.push_back(current);

    const bool met = value <= c.epsilon;
    if (met || k >= c.max_outer_iters) {
      result.trace.stopped_reason = met ? StopReason::ThresholdMet : StopReason::MaxItersReached;
      result.final_image = std::move(current);
      break;
    }
    previous = std::move(current);
  }
  return result;
}

} // namespace ringshift
