#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace claimsearch::text {

bool is_space(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

// Collapses every whitespace run to one space and strips both ends.
std::string normalize_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;

// 64-bit FNV-1a. Stable across platforms; used for feature hashing and seeds.
std::uint64_t fnv1a64(std::string_view s) noexcept;

std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace claimsearch::text
