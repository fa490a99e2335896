#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace tsexam::harness {

// FNV-1a 64-bit content digest. Fast and stable across platforms; used for
// manifest entries and prompt fingerprints, not for security.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(std::string_view text);

// Incremental variants: feed more bytes into a running digest.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t state);
std::uint64_t fnv1a64(std::string_view text, std::uint64_t state);
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

// Digest as a fixed-width lowercase hex string prefixed with the algorithm
// name, e.g. "fnv1a64:00000100000001b3".
std::string digest_label(std::uint64_t digest);

// Digest of a file's raw bytes. Throws IoError when unreadable.
std::string digest_file(const std::string& path);

}  // namespace tsexam::harness
