#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ringshift/mean_shift.hpp"
#include "ringshift/ring_image.hpp"

namespace ringshift {

enum class ImageFormat {
  PgmAscii,  ///< P2
  PgmBinary, ///< P5
  Png,       ///< grayscale, bit depth chosen from the modulus
};

enum class IoErrorKind {
  UnreadableFile,
  UnwritableFile,
  MalformedHeader,
  UnsupportedFormat,
  MalformedPixel,
  FormatMismatch, ///< the image's modulus can't be represented by the requested format
};

std::string_view to_string(IoErrorKind kind);

class ImageIoError : public std::runtime_error {
public:
  ImageIoError(IoErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  IoErrorKind kind() const noexcept { return kind_; }

private:
  IoErrorKind kind_;
};

/// Decodes P2, P5 or grayscale PNG, sniffed from the leading bytes.
/// PGM gives modulus maxval + 1; PNG gives 2^bitdepth.
RingImage decode_image(std::span<const std::uint8_t> bytes, std::string_view source = "<memory>");
RingImage load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_image(const RingImage& image, ImageFormat format);
void save_image(const RingImage& image, const std::filesystem::path& path, ImageFormat format);

/// .pgm -> P5, .png -> PNG. Anything else is UnsupportedFormat.
ImageFormat format_for_path(const std::filesystem::path& path);

// Iteration traces, one "k,criterion_value,entropy_after" row per outer
// iteration, closed by "# stopped: <reason>". Reals are written in shortest
// round-trip form.
std::string format_trace_csv(const IterationTrace& trace);
void write_trace_csv(const IterationTrace& trace, const std::filesystem::path& path);
IterationTrace parse_trace_csv(std::string_view text);
IterationTrace read_trace_csv(const std::filesystem::path& path);

struct PixelCoord {
  Eigen::Index x = 0;
  Eigen::Index y = 0;

  friend bool operator==(PixelCoord, PixelCoord) = default;
};

struct ProfileSample {
  std::size_t t = 0;
  std::uint64_t value = 0;

  friend bool operator==(ProfileSample, ProfileSample) = default;
};

struct ProfileLine {
  PixelCoord start;
  PixelCoord end;
  std::vector<ProfileSample> samples;
};

/// Pixel values under the Bresenham rasterization of start -> end, ordered
/// from start. Always max(|dx|, |dy|) + 1 samples.
template <typename Pixel>
ProfileLine extract_profile(const BasicRingImage<Pixel>& a, PixelCoord start, PixelCoord end) {
  const auto inside = [&a](PixelCoord p) {
    return p.x >= 0 && p.y >= 0 && p.x < a.width() && p.y < a.height();
  };
  for (const PixelCoord p : {start, end}) {
    if (!inside(p)) {
      throw DomainError("profile endpoint (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                        ") outside " + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " image");
    }
  }

  ProfileLine line{start, end, {}};
  const Eigen::Index dx = std::abs(end.x - start.x);
  const Eigen::Index dy = -std::abs(end.y - start.y);
  const Eigen::Index step_x = start.x < end.x ? 1 : -1;
  const Eigen::Index step_y = start.y < end.y ? 1 : -1;
  Eigen::Index err = dx + dy;
  PixelCoord p = start;
  for (std::size_t t = 0;; ++t) {
    line.samples.push_back({t, a(p.x, p.y)});
    if (p == end) break;
    const Eigen::Index e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      p.x += step_x;
    }
    if (e2 <= dx) {
      err += dx;
      p.y += step_y;
    }
  }
  return line;
}

/// "t,value" rows.
void write_profile_csv(const ProfileLine& profile, const std::filesystem::path& path);

} // namespace ringshift
