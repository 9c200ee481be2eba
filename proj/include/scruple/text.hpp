#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scruple {

std::string to_lower(std::string_view s);

// Splits on whitespace. Punctuation is not treated specially beyond
// being lowercased; game text is plain ASCII words.
std::vector<std::string> tokenize(std::string_view s);

// Lowercases, drops the articles "the"/"a"/"an", collapses whitespace.
std::vector<std::string> normalize_action_tokens(std::string_view s);
std::string normalize_action(std::string_view s);

std::string join(const std::vector<std::string>& words, std::string_view sep = " ");

// FNV-1a, the workhorse hash for feature indices and seed derivation.
constexpr uint64_t fnv1a64(std::string_view s, uint64_t h = 1469598103934665603ULL) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

constexpr uint64_t hash_combine(uint64_t a, uint64_t b) {
    // splitmix64 finalizer over the xor
    uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace scruple
