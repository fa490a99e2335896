#include "tsexam/digest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "tsexam/errors.hpp"

namespace tsexam::harness {

namespace {
constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kPrime = 0x100000001b3ULL;
}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t state) {
    std::uint64_t h = state;
    for (unsigned char byte : bytes) {
        h ^= byte;
        h *= kPrime;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t state) {
    return fnv1a64(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()),
                   state);
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) { return fnv1a64(bytes, kOffset); }

std::uint64_t fnv1a64(std::string_view text) { return fnv1a64(text, kOffset); }

std::string digest_label(std::uint64_t digest) {
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << digest;
    return os.str();
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("digest_file: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return digest_label(fnv1a64(std::span<const unsigned char>(bytes)));
}

}  // namespace tsexam::harness
