#include "ausn/packing.hpp"

#include <stdexcept>
#include <string>

namespace ausn {

namespace {

// MSB-first bit cursor over a byte vector.
class BitWriter {
public:
    explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void put(std::uint32_t value, int nbits) {
        for (int i = nbits - 1; i >= 0; --i) {
            const std::size_t byte = pos_ / 8;
            if (byte >= out_.size()) out_.push_back(0);
            if ((value >> i) & 1u) {
                out_[byte] |= static_cast<std::uint8_t>(0x80u >> (pos_ % 8));
            }
            ++pos_;
        }
    }

private:
    std::vector<std::uint8_t>& out_;
    std::size_t pos_ = 0;
};

class BitReader {
public:
    BitReader(std::span<const std::uint8_t> bytes, std::size_t total_bits)
        : bytes_(bytes), total_bits_(total_bits) {}

    std::uint32_t take(int nbits) {
        std::uint32_t value = 0;
        for (int i = 0; i < nbits; ++i) {
            if (pos_ >= total_bits_) {
                throw std::invalid_argument("unpack: truncated payload");
            }
            const std::uint8_t byte = bytes_[pos_ / 8];
            value = (value << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
            ++pos_;
        }
        return value;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t total_bits_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> pack(std::span<const CodeWord> codes, const BitLayout& layout) {
    std::vector<std::uint8_t> out;
    out.reserve((codes.size() * static_cast<std::size_t>(layout.total_bits) + 7) / 8);
    BitWriter writer(out);
    for (const CodeWord& code : codes) {
        validate_code(code, layout);
        writer.put(code.negative ? 1u : 0u, 1);
        for (int i = 0; i < layout.field_count(); ++i) {
            writer.put(code.k[static_cast<std::size_t>(i)], layout.field_bits(i));
        }
    }
    return out;
}

std::vector<CodeWord> unpack(std::span<const std::uint8_t> bytes, std::size_t count,
                             const BitLayout& layout) {
    const std::size_t needed_bits = count * static_cast<std::size_t>(layout.total_bits);
    if (bytes.size() * 8 < needed_bits) {
        throw std::invalid_argument("unpack: payload holds " + std::to_string(bytes.size()) +
                                    " bytes, need " + std::to_string((needed_bits + 7) / 8));
    }
    BitReader reader(bytes, bytes.size() * 8);
    std::vector<CodeWord> codes(count);
    for (CodeWord& code : codes) {
        code.negative = reader.take(1) != 0;
        code.field_count = static_cast<std::uint8_t>(layout.field_count());
        for (int i = 0; i < layout.field_count(); ++i) {
            code.k[static_cast<std::size_t>(i)] =
                static_cast<std::uint16_t>(reader.take(layout.field_bits(i)));
        }
        validate_code(code, layout);
    }
    return codes;
}

}  // namespace ausn
