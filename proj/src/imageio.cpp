#include "ringshift/imageio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include "io_util.hpp"
#include "png_codec.hpp"

namespace ringshift {

std::string_view to_string(IoErrorKind kind) {
  switch (kind) {
  case IoErrorKind::UnreadableFile: return "unreadable file";
  case IoErrorKind::UnwritableFile: return "unwritable file";
  case IoErrorKind::MalformedHeader: return "malformed header";
  case IoErrorKind::UnsupportedFormat: return "unsupported format";
  case IoErrorKind::MalformedPixel: return "malformed pixel";
  case IoErrorKind::FormatMismatch: return "modulus/format mismatch";
  }
  return "image i/o error";
}

namespace {

constexpr std::uint64_t kMaxPgmMaxval = 65535;

// Tokenizer over a PNM header or plain raster. '#' starts a comment that runs
// to the end of the line.
class PnmCursor {
public:
  PnmCursor(std::span<const std::uint8_t> bytes, std::string_view source)
      : bytes_(bytes), source_(source) {}

  std::size_t offset() const noexcept { return pos_; }

  std::string where(std::size_t at) const {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < at && i < bytes_.size(); ++i) {
      if (bytes_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    return std::string(source_) + ":" + std::to_string(line) + ":" + std::to_string(column);
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Next unsigned decimal; std::nullopt at end of input or on a non-digit.
  std::optional<std::uint64_t> next_unsigned() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) return std::nullopt;
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (std::uint64_t{1} << 40)) return std::nullopt;
      ++pos_;
    }
    if (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      return std::nullopt;
    }
    return value;
  }

  bool at_end() const noexcept { return pos_ >= bytes_.size(); }
  std::uint8_t peek() const { return bytes_[pos_]; }
  void advance(std::size_t n = 1) { pos_ += n; }

private:
  std::span<const std::uint8_t> bytes_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

struct PgmHeader {
  bool binary = false;
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  std::uint64_t maxval = 0;
};

PgmHeader read_pgm_header(PnmCursor& cur) {
  PgmHeader hdr;
  cur.advance(); // 'P'
  hdr.binary = cur.peek() == '5';
  cur.advance();

  const auto field = [&cur](const char* name) {
    const std::size_t at = cur.offset();
    const auto v = cur.next_unsigned();
    if (!v) {
      throw ImageIoError(IoErrorKind::MalformedHeader,
                         cur.where(at) + ": expected " + name + " as an unsigned integer");
    }
    return *v;
  };
  const std::size_t dims_at = cur.offset();
  const std::uint64_t width = field("width");
  const std::uint64_t height = field("height");
  if (width == 0 || height == 0) {
    throw ImageIoError(IoErrorKind::MalformedHeader,
                       cur.where(dims_at) + ": image dimensions must be positive");
  }
  const std::size_t maxval_at = cur.offset();
  hdr.maxval = field("maxval");
  if (hdr.maxval == 0 || hdr.maxval > kMaxPgmMaxval) {
    throw ImageIoError(IoErrorKind::MalformedHeader,
                       cur.where(maxval_at) + ": maxval " + std::to_string(hdr.maxval) +
                           " outside [1, 65535]");
  }
  hdr.width = static_cast<Eigen::Index>(width);
  hdr.height = static_cast<Eigen::Index>(height);
  return hdr;
}

RingImage decode_pgm(std::span<const std::uint8_t> bytes, std::string_view source) {
  PnmCursor cur(bytes, source);
  const PgmHeader hdr = read_pgm_header(cur);
  const Modulus modulus{hdr.maxval + 1};
  RingImage::Pixels pixels(hdr.height, hdr.width);
  const Eigen::Index count = hdr.width * hdr.height;

  const auto check_value = [&](std::uint64_t v, Eigen::Index i, std::size_t at) {
    if (v > hdr.maxval) {
      throw ImageIoError(IoErrorKind::MalformedPixel,
                         cur.where(at) + ": pixel " + std::to_string(i) + " has value " +
                             std::to_string(v) + " above maxval " + std::to_string(hdr.maxval));
    }
    pixels.data()[i] = static_cast<std::uint16_t>(v);
  };

  if (hdr.binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    if (cur.at_end() || !std::isspace(cur.peek())) {
      throw ImageIoError(IoErrorKind::MalformedHeader,
                         cur.where(cur.offset()) + ": missing whitespace before raster");
    }
    cur.advance();
    const std::size_t sample_bytes = hdr.maxval > 255 ? 2 : 1;
    const std::size_t start = cur.offset();
    const std::size_t available = bytes.size() - start;
    for (Eigen::Index i = 0; i < count; ++i) {
      const std::size_t at = start + static_cast<std::size_t>(i) * sample_bytes;
      if (at + sample_bytes > bytes.size()) {
        throw ImageIoError(IoErrorKind::MalformedPixel,
                           std::string(source) + ": raster truncated at pixel " +
                               std::to_string(i) + " (byte offset " + std::to_string(at) +
                               ", " + std::to_string(available) + " raster bytes present)");
      }
      const std::uint64_t v = sample_bytes == 1
                                  ? bytes[at]
                                  : (std::uint64_t{bytes[at]} << 8) | bytes[at + 1];
      check_value(v, i, at);
    }
  } else {
    for (Eigen::Index i = 0; i < count; ++i) {
      cur.skip_space_and_comments();
      const std::size_t at = cur.offset();
      const auto v = cur.next_unsigned();
      if (!v) {
        throw ImageIoError(IoErrorKind::MalformedPixel,
                           cur.where(at) + ": pixel " + std::to_string(i) +
                               (cur.at_end() ? " missing" : " is not an unsigned integer"));
      }
      check_value(*v, i, at);
    }
  }
  return RingImage(std::move(pixels), modulus);
}

std::vector<std::uint8_t> encode_pgm(const RingImage& image, bool binary) {
  if (image.modulus().value() > kMaxPgmMaxval + 1) {
    throw ImageIoError(IoErrorKind::FormatMismatch,
                       "PGM holds at most 65536 gray levels, image has modulus " +
                           std::to_string(image.modulus().value()));
  }
  const std::uint64_t maxval = image.modulus().max_residue();
  const std::string header = std::string(binary ? "P5" : "P2") + "\n" +
                             std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n" + std::to_string(maxval) +
                             "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());

  if (binary) {
    const bool wide = maxval > 255;
    for (Eigen::Index i = 0; i < image.size(); ++i) {
      const std::uint16_t v = image[i];
      if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
  }

  // Plain PGM lines should stay under 70 characters.
  for (Eigen::Index y = 0; y < image.height(); ++y) {
    std::size_t line_length = 0;
    for (Eigen::Index x = 0; x < image.width(); ++x) {
      const std::string token = std::to_string(image(x, y));
      if (line_length > 0 && line_length + 1 + token.size() > 69) {
        out.push_back('\n');
        line_length = 0;
      } else if (line_length > 0) {
        out.push_back(' ');
        ++line_length;
      }
      out.insert(out.end(), token.begin(), token.end());
      line_length += token.size();
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ImageIoError(IoErrorKind::UnreadableFile, path.string() + ": cannot open for reading");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw ImageIoError(IoErrorKind::UnreadableFile, path.string() + ": read failed");
  }
  return bytes;
}

} // namespace

void detail::write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ImageIoError(IoErrorKind::UnwritableFile, path.string() + ": cannot open for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) {
    throw ImageIoError(IoErrorKind::UnwritableFile, path.string() + ": write failed");
  }
}

RingImage decode_image(std::span<const std::uint8_t> bytes, std::string_view source) {
  if (bytes.size() >= 8 && std::equal(std::begin(detail::kPngSignature),
                                      std::end(detail::kPngSignature), bytes.begin())) {
    return detail::decode_png(bytes, source);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
    return decode_pgm(bytes, source);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7') {
    throw ImageIoError(IoErrorKind::UnsupportedFormat,
                       std::string(source) + ": netpbm variant P" + static_cast<char>(bytes[1]) +
                           " is not grayscale PGM");
  }
  throw ImageIoError(IoErrorKind::UnsupportedFormat,
                     std::string(source) + ": not a PGM (P2/P5) or PNG file");
}

RingImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_image(bytes, path.string());
}

std::vector<std::uint8_t> encode_image(const RingImage& image, ImageFormat format) {
  switch (format) {
  case ImageFormat::PgmAscii: return encode_pgm(image, false);
  case ImageFormat::PgmBinary: return encode_pgm(image, true);
  case ImageFormat::Png: return detail::encode_png(image);
  }
  throw ImageIoError(IoErrorKind::UnsupportedFormat, "unknown image format");
}

void save_image(const RingImage& image, const std::filesystem::path& path, ImageFormat format) {
  detail::write_file(path, encode_image(image, format));
}

ImageFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pgm") return ImageFormat::PgmBinary;
  if (ext == ".png") return ImageFormat::Png;
  throw ImageIoError(IoErrorKind::UnsupportedFormat,
                     path.string() + ": output extension must be .pgm or .png");
}

void write_profile_csv(const ProfileLine& profile, const std::filesystem::path& path) {
  std::string text = "t,value\n";
  for (const auto& s : profile.samples) {
    text += std::to_string(s.t) + "," + std::to_string(s.value) + "\n";
  }
  detail::write_file(path, text);
}

} // namespace ringshift
