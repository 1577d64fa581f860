#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace xlt::util {

// FNV-1a over bytes; manifests use it to fingerprint inputs and outputs.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t fnv1a_file(const std::filesystem::path& file);

// "fnv1a:<16 hex digits>"
std::string hash_tag(std::uint64_t value);

}  // namespace xlt::util
