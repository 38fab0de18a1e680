#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>

#include "ringshift/errors.hpp"

namespace ringshift {

/// Number of residue classes n of the ring Z_n. Always at least 2.
class Modulus {
public:
  constexpr explicit Modulus(std::uint64_t n) : n_(n) {
    if (n < 2) {
      throw ModulusError("modulus must be at least 2, got " + std::to_string(n));
    }
  }

  constexpr std::uint64_t value() const noexcept { return n_; }
  constexpr std::uint64_t max_residue() const noexcept { return n_ - 1; }

  friend constexpr bool operator==(Modulus, Modulus) = default;

private:
  std::uint64_t n_;
};

/// The single gray level shared by every pixel of a scalar image.
struct ScalarImageWitness {
  std::uint64_t value = 0;

  friend constexpr bool operator==(ScalarImageWitness, ScalarImageWitness) = default;
};

/// A width x height grid of residues in Z_n, stored row-major.
///
/// Pixel is the storage type; it must be able to hold n - 1. The invariant
/// 0 <= pixel < n is checked on construction and can't be broken afterwards
/// because the grid is only exposed read-only.
template <typename Pixel>
class BasicRingImage {
  static_assert(std::is_unsigned_v<Pixel> && sizeof(Pixel) <= 4,
                "ring images store unsigned residues of at most 32 bits");

public:
  using PixelType = Pixel;
  using Pixels = Eigen::Array<Pixel, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  /// Zero image.
  BasicRingImage(Eigen::Index width, Eigen::Index height, Modulus modulus = Modulus{256})
      : modulus_(checked_modulus(modulus)) {
    check_shape(width, height);
    pixels_ = Pixels::Zero(height, width);
  }

  /// Takes ownership of a height x width grid. Throws DomainError on any
  /// value >= modulus.
  BasicRingImage(Pixels pixels, Modulus modulus)
      : pixels_(std::move(pixels)), modulus_(checked_modulus(modulus)) {
    check_shape(pixels_.cols(), pixels_.rows());
    for (Eigen::Index i = 0; i < pixels_.size(); ++i) {
      if (static_cast<std::uint64_t>(pixels_.data()[i]) >= modulus_.value()) {
        throw DomainError("pixel " + std::to_string(i) + " has value " +
                          std::to_string(pixels_.data()[i]) + " outside [0, " +
                          std::to_string(modulus_.value()) + ")");
      }
    }
  }

  /// Builds an image from row-major values given in any integer type.
  template <typename T>
  static BasicRingImage from_row_major(Eigen::Index width, Eigen::Index height, Modulus modulus,
                                       std::span<const T> values) {
    static_assert(std::is_integral_v<T>);
    check_shape(width, height);
    if (static_cast<Eigen::Index>(values.size()) != width * height) {
      throw ShapeError("expected " + std::to_string(width * height) + " pixels, got " +
                       std::to_string(values.size()));
    }
    checked_modulus(modulus);
    Pixels pixels(height, width);
    for (Eigen::Index i = 0; i < pixels.size(); ++i) {
      const T v = values[static_cast<std::size_t>(i)];
      if (v < 0 || static_cast<std::uint64_t>(v) >= modulus.value()) {
        throw DomainError("pixel " + std::to_string(i) + " has value " + std::to_string(v) +
                          " outside [0, " + std::to_string(modulus.value()) + ")");
      }
      pixels.data()[i] = static_cast<Pixel>(v);
    }
    return BasicRingImage(std::move(pixels), modulus, Unchecked{});
  }

  template <typename T>
  static BasicRingImage from_row_major(Eigen::Index width, Eigen::Index height, Modulus modulus,
                                       std::initializer_list<T> values) {
    return from_row_major(width, height, modulus,
                          std::span<const T>(values.begin(), values.size()));
  }

  Eigen::Index width() const noexcept { return pixels_.cols(); }
  Eigen::Index height() const noexcept { return pixels_.rows(); }
  Eigen::Index size() const noexcept { return pixels_.size(); }
  Modulus modulus() const noexcept { return modulus_; }
  const Pixels& pixels() const noexcept { return pixels_; }

  /// Pixel at column x, row y.
  Pixel operator()(Eigen::Index x, Eigen::Index y) const { return pixels_(y, x); }
  /// Pixel at row-major index i.
  Pixel operator[](Eigen::Index i) const { return pixels_.data()[i]; }

  bool same_shape(const BasicRingImage& other) const noexcept {
    return width() == other.width() && height() == other.height();
  }

  friend bool operator==(const BasicRingImage& a, const BasicRingImage& b) {
    return a.modulus_ == b.modulus_ && a.same_shape(b) && (a.pixels_ == b.pixels_).all();
  }

  static void check_shape(Eigen::Index width, Eigen::Index height) {
    if (width <= 0 || height <= 0) {
      throw ShapeError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                       std::to_string(height));
    }
  }

  // Used by the pixel-wise operations, whose results are in range by construction.
  struct Unchecked {};
  BasicRingImage(Pixels pixels, Modulus modulus, Unchecked)
      : pixels_(std::move(pixels)), modulus_(modulus) {}

private:
  static Modulus checked_modulus(Modulus modulus) {
    constexpr std::uint64_t capacity =
        static_cast<std::uint64_t>(std::numeric_limits<Pixel>::max()) + 1;
    if (modulus.value() > capacity) {
      throw ModulusError("modulus " + std::to_string(modulus.value()) +
                         " does not fit the pixel storage type (capacity " +
                         std::to_string(capacity) + ")");
    }
    return modulus;
  }

  Pixels pixels_;
  Modulus modulus_;
};

/// 16-bit storage covers every modulus a PGM or PNG file can declare.
using RingImage = BasicRingImage<std::uint16_t>;

namespace detail {

template <typename Pixel>
void require_same_ring(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b,
                       const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                     std::to_string(b.height()));
  }
  if (a.modulus() != b.modulus()) {
    throw ModulusError(std::string(op) + ": modulus mismatch " +
                       std::to_string(a.modulus().value()) + " vs " +
                       std::to_string(b.modulus().value()));
  }
}

// Applies a binary residue operation in 64-bit arithmetic, then reduces mod n.
template <typename Pixel, typename Op>
BasicRingImage<Pixel> pixelwise(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b,
                                const char* name, Op op) {
  require_same_ring(a, b, name);
  const std::uint64_t n = a.modulus().value();
  typename BasicRingImage<Pixel>::Pixels out =
      a.pixels()
          .template cast<std::uint64_t>()
          .binaryExpr(b.pixels().template cast<std::uint64_t>(),
                      [n, op](std::uint64_t x, std::uint64_t y) { return op(x, y, n); })
          .template cast<Pixel>();
  return {std::move(out), a.modulus(), typename BasicRingImage<Pixel>::Unchecked{}};
}

} // namespace detail

template <typename Pixel>
BasicRingImage<Pixel> ring_add(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  return detail::pixelwise(a, b, "ring_add",
                           [](std::uint64_t x, std::uint64_t y, std::uint64_t n) {
                             return (x + y) % n;
                           });
}

template <typename Pixel>
BasicRingImage<Pixel> ring_sub(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  return detail::pixelwise(a, b, "ring_sub",
                           [](std::uint64_t x, std::uint64_t y, std::uint64_t n) {
                             return (x + (n - y)) % n;
                           });
}

template <typename Pixel>
BasicRingImage<Pixel> ring_mul(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  return detail::pixelwise(a, b, "ring_mul",
                           [](std::uint64_t x, std::uint64_t y, std::uint64_t n) {
                             return (x * y) % n;
                           });
}

/// Additive inverse: (n - v) mod n per pixel.
template <typename Pixel>
BasicRingImage<Pixel> ring_neg(const BasicRingImage<Pixel>& a) {
  const std::uint64_t n = a.modulus().value();
  typename BasicRingImage<Pixel>::Pixels out =
      a.pixels()
          .template cast<std::uint64_t>()
          .unaryExpr([n](std::uint64_t v) { return (n - v) % n; })
          .template cast<Pixel>();
  return {std::move(out), a.modulus(), typename BasicRingImage<Pixel>::Unchecked{}};
}

template <typename Pixel>
BasicRingImage<Pixel> operator+(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  return ring_add(a, b);
}
template <typename Pixel>
BasicRingImage<Pixel> operator-(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  return ring_sub(a, b);
}
template <typename Pixel>
BasicRingImage<Pixel> operator*(const BasicRingImage<Pixel>& a, const BasicRingImage<Pixel>& b) {
  return ring_mul(a, b);
}
template <typename Pixel>
BasicRingImage<Pixel> operator-(const BasicRingImage<Pixel>& a) {
  return ring_neg(a);
}

/// Image whose every pixel equals value. Throws DomainError if value >= n.
template <typename Pixel = std::uint16_t>
BasicRingImage<Pixel> scalar_image(std::uint64_t value, Eigen::Index width, Eigen::Index height,
                                   Modulus modulus = Modulus{256}) {
  if (value >= modulus.value()) {
    throw DomainError("scalar value " + std::to_string(value) + " outside [0, " +
                      std::to_string(modulus.value()) + ")");
  }
  BasicRingImage<Pixel>::check_shape(width, height);
  return {BasicRingImage<Pixel>::Pixels::Constant(height, width, static_cast<Pixel>(value)),
          modulus};
}

/// Scalar image with the same shape and ring as like.
template <typename Pixel>
BasicRingImage<Pixel> scalar_like(const BasicRingImage<Pixel>& like, std::uint64_t value) {
  return scalar_image<Pixel>(value, like.width(), like.height(), like.modulus());
}

/// Witness value when all pixels are equal; a one-pixel image is scalar.
template <typename Pixel>
std::optional<ScalarImageWitness> is_scalar(const BasicRingImage<Pixel>& a) {
  const Pixel first = a[0];
  if ((a.pixels() == first).all()) {
    return ScalarImageWitness{first};
  }
  return std::nullopt;
}

} // namespace ringshift
