#include "xlt/util/hash.hpp"

#include <cstdio>
#include <fstream>

#include "xlt/errors.hpp"

namespace xlt::util {

namespace {
constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kPrime = 0x100000001b3ULL;
}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = kOffset;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kPrime;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw data_error("cannot hash missing file: " + file.string());
  std::uint64_t h = kOffset;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= kPrime;
    }
  }
  return h;
}

std::string hash_tag(std::uint64_t value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace xlt::util
