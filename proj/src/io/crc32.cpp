#include "carbospec/io/crc32.hpp"

#include <array>

namespace carbospec {
namespace {

std::array<std::uint32_t, 256> buildTable() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int bit = 0; bit < 8; ++bit) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

} // namespace

std::uint32_t crc32(const void* data, std::size_t length, std::uint32_t seed) {
    static const std::array<std::uint32_t, 256> table = buildTable();
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint32_t crc = seed ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < length; ++i) {
        crc = table[(crc ^ bytes[i]) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

} // namespace carbospec
