#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "weyl1d/spectral.hpp"

namespace weyl1d {

/// Binary spectrum file, host byte order:
///   "W1DSPEC\0", u32 version, u32 reserved, u64 space fingerprint,
///   u64 mesh key, u64 computed count, u64 resolved count,
///   f64 mesh size, f64 H^1, f64 resolution threshold, f64 eigenvalues[count].
inline constexpr std::uint32_t kSpectrumCacheVersion = 1;

void write_spectrum(const std::filesystem::path& file, const Spectrum& spec, std::uint64_t mesh_key);

/// nullopt when the file is missing, truncated, of another version or keyed
/// differently.
std::optional<Spectrum> read_spectrum(const std::filesystem::path& file, std::uint64_t space_fingerprint,
                                      std::uint64_t mesh_key);

/// WEYL1D_CACHE_DIR if set and non-empty.
std::optional<std::filesystem::path> cache_directory();

/// Key for a solve: mesh fingerprint mixed with the requested count.
std::uint64_t mesh_key(const Discretization& disc, std::size_t count_requested);

/// eigen_solve through the cache directory (WEYL1D_CACHE_DIR when `dir` is
/// not given; no caching if neither is available).
Spectrum cached_eigen_solve(const ModelSpace& space, const Discretization& disc, std::size_t count_requested,
                            std::optional<std::filesystem::path> dir = std::nullopt);

}  // namespace weyl1d
