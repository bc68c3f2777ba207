#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gridflow {

// 64-bit FNV-1a. Used for content digests in manifests and checkpoints, not
// for anything security related.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

}  // namespace gridflow
