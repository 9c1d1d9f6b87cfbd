#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ausn/layout.hpp"

namespace ausn {

// Serializes codes to an MSB-first bitstream: per code the sign bit
// (1 = negative), then k_0 in b_basic bits, then each tier code, all
// most-significant-bit first. Codes are concatenated back to back and the
// stream is zero-padded to a byte boundary at the end.
// Throws std::invalid_argument when a code does not fit the layout.
std::vector<std::uint8_t> pack(std::span<const CodeWord> codes, const BitLayout& layout);

// Inverse of pack. Trailing pad bits are ignored. Throws
// std::invalid_argument on a truncated payload or when a decoded code
// violates the CodeWord invariants (e.g. sign bit set on a zero code).
std::vector<CodeWord> unpack(std::span<const std::uint8_t> bytes, std::size_t count,
                             const BitLayout& layout);

}  // namespace ausn
