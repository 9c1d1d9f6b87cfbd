#pragma once

#include <filesystem>

#include "ausn/quantizer.hpp"

namespace ausn {

// Container file: "AUSN" magic, version byte 1, u32 little-endian metadata
// length, UTF-8 JSON metadata (layout, shape, power_j, element count,
// rounding mode, creator version), then the packed bitstream.
inline constexpr char kContainerMagic[4] = {'A', 'U', 'S', 'N'};
inline constexpr std::uint8_t kContainerVersion = 1;

void save_container(const std::filesystem::path& path, const QuantizedTensor& qt);

// Throws std::runtime_error on bad magic, version > 1, or when the payload
// length disagrees with the metadata element count.
QuantizedTensor load_container(const std::filesystem::path& path);

}  // namespace ausn
