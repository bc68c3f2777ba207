#include "gridflow/common/digest.hpp"

#include <fmt/format.h>

namespace gridflow {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data) { return fmt::format("{:016x}", fnv1a64(data)); }

}  // namespace gridflow
