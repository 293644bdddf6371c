#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace qgen {

// 128-bit content identifier rendered as 32 lowercase hex digits. Computed as
// the leading half of SHA-256 over the length-prefixed parts, so ("ab","c")
// and ("a","bc") never collide structurally.
std::string content_id(std::initializer_list<std::string_view> parts);

// 64-bit FNV-1a. Stable across platforms; used for seeding.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace qgen
