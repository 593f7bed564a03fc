#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dhfair {

/// Whole file as a string. Throws ParseError if unreadable.
std::string readTextFile(const std::filesystem::path& path);

/// Writes to a sibling temporary then renames over `path`, so a failed
/// write never leaves a partial file behind.
void writeFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

/// Shortest decimal that parses back to exactly `value`.
std::string formatDouble(double value);

/// Strict decimal parse of the whole field (no trailing junk).
bool parseDouble(std::string_view text, double& out);

/// 64-bit FNV-1a, used for provenance fingerprints.
std::uint64_t fnv1a(std::string_view bytes);

std::string hexDigest(std::uint64_t h);

}  // namespace dhfair
