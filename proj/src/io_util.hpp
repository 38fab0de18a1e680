#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>

namespace ringshift::detail {

/// Truncates and writes; throws ImageIoError(UnwritableFile) on failure.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

} // namespace ringshift::detail
