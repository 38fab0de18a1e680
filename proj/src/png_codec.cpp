#include "png_codec.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <memory>
#include <string>

#include "ringshift/imageio.hpp"

namespace ringshift::detail {

namespace {

// libpng reports errors by longjmp. Everything touched after setjmp lives in
// this heap block, reached through a pointer that never changes.
struct PngState {
  std::span<const std::uint8_t> input;
  std::size_t read_pos = 0;
  std::vector<std::uint8_t> output;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> scratch_row;
  char message[256] = {};
};

void on_error(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngState*>(png_get_io_ptr(png));
  if (state->read_pos + length > state->input.size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, state->input.data() + state->read_pos, length);
  state->read_pos += length;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngState*>(png_get_io_ptr(png));
  state->output.insert(state->output.end(), data, data + length);
}

void flush_noop(png_structp) {}

struct DecodedHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

// Returns false when libpng raised an error; the message is in state.
bool decode_into(PngState* state, DecodedHeader* hdr, RingImage::Pixels* pixels,
                 std::string* rejection) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state, on_error, on_warning);
  if (png == nullptr) {
    std::snprintf(state->message, sizeof(state->message), "out of memory");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    std::snprintf(state->message, sizeof(state->message), "out of memory");
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, state, read_from_memory);
  png_read_info(png, info);
  hdr->width = png_get_image_width(png, info);
  hdr->height = png_get_image_height(png, info);
  hdr->bit_depth = png_get_bit_depth(png, info);
  hdr->color_type = png_get_color_type(png, info);

  if (hdr->color_type != PNG_COLOR_TYPE_GRAY) {
    *rejection = "only single-channel grayscale PNG is supported (color type " +
                 std::to_string(hdr->color_type) + ")";
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
  }
  // Sub-byte depths are unpacked to one sample per byte without rescaling.
  if (hdr->bit_depth < 8) png_set_packing(png);
  if (hdr->bit_depth == 16) png_set_swap(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  state->output.assign(rowbytes * hdr->height, 0);
  state->rows.resize(hdr->height);
  for (png_uint_32 y = 0; y < hdr->height; ++y) {
    state->rows[y] = state->output.data() + y * rowbytes;
  }
  png_read_image(png, state->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  pixels->resize(hdr->height, hdr->width);
  for (png_uint_32 y = 0; y < hdr->height; ++y) {
    const std::uint8_t* row = state->output.data() + y * rowbytes;
    for (png_uint_32 x = 0; x < hdr->width; ++x) {
      std::uint16_t v = 0;
      if (hdr->bit_depth == 16) {
        std::memcpy(&v, row + 2 * x, 2);
      } else {
        v = row[x];
      }
      (*pixels)(y, x) = v;
    }
  }
  return true;
}

int bit_depth_for(std::uint64_t modulus) {
  switch (modulus) {
  case 2: return 1;
  case 4: return 2;
  case 16: return 4;
  case 256: return 8;
  case 65536: return 16;
  default: return 0;
  }
}

bool encode_from(PngState* state, const RingImage* image, int bit_depth) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, state, on_error, on_warning);
  if (png == nullptr) {
    std::snprintf(state->message, sizeof(state->message), "out of memory");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    std::snprintf(state->message, sizeof(state->message), "out of memory");
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  const auto width = static_cast<png_uint_32>(image->width());
  const auto height = static_cast<png_uint_32>(image->height());
  png_set_write_fn(png, state, write_to_memory, flush_noop);
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  // One row at a time, packed by hand into PNG's big-endian / MSB-first layout.
  const std::size_t rowbytes = (static_cast<std::size_t>(width) * bit_depth + 7) / 8;
  std::vector<std::uint8_t>& row = state->scratch_row;
  row.resize(rowbytes);
  for (png_uint_32 y = 0; y < height; ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (png_uint_32 x = 0; x < width; ++x) {
      const std::uint16_t v = (*image)(x, y);
      if (bit_depth == 16) {
        row[2 * x] = static_cast<std::uint8_t>(v >> 8);
        row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
      } else if (bit_depth == 8) {
        row[x] = static_cast<std::uint8_t>(v);
      } else {
        const std::size_t bit = static_cast<std::size_t>(x) * bit_depth;
        row[bit / 8] |= static_cast<std::uint8_t>(v << (8 - bit_depth - bit % 8));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

} // namespace

RingImage decode_png(std::span<const std::uint8_t> bytes, std::string_view source) {
  auto state = std::make_unique<PngState>();
  state->input = bytes;
  auto hdr = std::make_unique<DecodedHeader>();
  auto pixels = std::make_unique<RingImage::Pixels>();
  auto rejection = std::make_unique<std::string>();

  if (!decode_into(state.get(), hdr.get(), pixels.get(), rejection.get())) {
    const bool in_header = hdr->width == 0;
    throw ImageIoError(in_header ? IoErrorKind::MalformedHeader : IoErrorKind::MalformedPixel,
                       std::string(source) + ": " + state->message);
  }
  if (!rejection->empty()) {
    throw ImageIoError(IoErrorKind::UnsupportedFormat, std::string(source) + ": " + *rejection);
  }
  return RingImage(std::move(*pixels), Modulus{std::uint64_t{1} << hdr->bit_depth});
}

std::vector<std::uint8_t> encode_png(const RingImage& image) {
  const int depth = bit_depth_for(image.modulus().value());
  if (depth == 0) {
    throw ImageIoError(IoErrorKind::FormatMismatch,
                       "grayscale PNG stores 2^depth levels (2, 4, 16, 256 or 65536); image has "
                       "modulus " + std::to_string(image.modulus().value()));
  }
  auto state = std::make_unique<PngState>();
  if (!encode_from(state.get(), &image, depth)) {
    throw ImageIoError(IoErrorKind::UnwritableFile, std::string("PNG encoding failed: ") +
                                                        state->message);
  }
  return std::move(state->output);
}

} // namespace ringshift::detail
