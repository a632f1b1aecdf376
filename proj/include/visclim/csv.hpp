#pragma once

#include "visclim/types.hpp"

#include <cstdint>
#include <filesystem>

/// Deterministic text output: fixed 17-significant-digit floats, atomic file
/// replacement, content hashing for the file headers.
namespace visclim {

/// Shortest round-trip-exact decimal form at 17 significant digits.
std::string fmt17(Real v);

/// FNV-1a 64-bit over bytes, hex string.
std::string fnv1a_hex(const std::string& bytes);

inline constexpr const char* kArtifactVersion = "visclim 0.1.0";

/// Write content to path via a temp file in the same directory + rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Standard comment header for every emitted file: artifact version, config
/// hash, and a legend mapping estimate ids to the inequality they certify.
std::string file_header(const std::string& config_hash, const std::string& legend);

}  // namespace visclim
