#pragma once

// On-disk cache for distance matrices. One file per (dataset fingerprint,
// kind, parameters) tuple; little-endian header followed by the dense upper
// triangle (diagonal included) row-major as 64-bit floats.

#include <filesystem>

#include "tsgc/distance.hpp"

namespace tsgc {

/// Cache file name for a matrix, e.g. "3fa2...9c_sdtw_g1.dmat".
std::string cache_file_name(const std::string& fingerprint, const DistanceKind& kind);

void save_distance_matrix(const DistanceMatrix& matrix, const std::filesystem::path& path);

/// Loads and validates a cached matrix. The expected fingerprint and kind
/// must match what the header/file name encode; n and parameters are checked
/// against the header. Throws IoError on any mismatch or truncation.
DistanceMatrix load_distance_matrix(const std::filesystem::path& path,
                                    const std::string& expected_fingerprint,
                                    const DistanceKind& expected_kind);

}  // namespace tsgc
