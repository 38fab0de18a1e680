#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ringshift/ring_image.hpp"

namespace ringshift::detail {

inline constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

RingImage decode_png(std::span<const std::uint8_t> bytes, std::string_view source);
std::vector<std::uint8_t> encode_png(const RingImage& image);

} // namespace ringshift::detail
