#include "weyl1d/spectrum_cache.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "hash.hpp"
#include "weyl1d/error.hpp"

namespace weyl1d {

namespace {

constexpr std::array<char, 8> kMagic{'W', '1', 'D', 'S', 'P', 'E', 'C', '\0'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void write_spectrum(const std::filesystem::path& file, const Spectrum& spec, std::uint64_t mesh_key) {
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(kMagic.data(), kMagic.size());
    put(out, kSpectrumCacheVersion);
    put(out, std::uint32_t{0});
    put(out, spec.space_fingerprint());
    put(out, mesh_key);
    put(out, static_cast<std::uint64_t>(spec.computed().size()));
    put(out, static_cast<std::uint64_t>(spec.resolved_count()));
    put(out, spec.mesh_size());
    put(out, spec.hausdorff_length());
    put(out, spec.resolution_threshold());
    for (double v : spec.computed()) put(out, v);
    if (!out) fail(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) fail(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::optional<Spectrum> read_spectrum(const std::filesystem::path& file, std::uint64_t space_fingerprint,
                                      std::uint64_t mesh_key) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) return std::nullopt;
  std::uint32_t version = 0;
  std::uint32_t reserved = 0;
  std::uint64_t fp = 0;
  std::uint64_t key = 0;
  std::uint64_t count = 0;
  std::uint64_t resolved = 0;
  double mesh_size = 0.0;
  double h1 = 0.0;
  double threshold = 0.0;
  if (!get(in, version) || version != kSpectrumCacheVersion || !get(in, reserved)) return std::nullopt;
  if (!get(in, fp) || fp != space_fingerprint || !get(in, key) || key != mesh_key) return std::nullopt;
  if (!get(in, count) || !get(in, resolved) || resolved > count || count > (1u << 28)) return std::nullopt;
  if (!get(in, mesh_size) || !get(in, h1) || !get(in, threshold)) return std::nullopt;
  std::vector<double> values(count);
  if (count > 0 && !in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)))) {
    return std::nullopt;
  }
  try {
    return Spectrum(std::move(values), resolved, mesh_size, fp, h1, threshold);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<std::filesystem::path> cache_directory() {
  const char* env = std::getenv("WEYL1D_CACHE_DIR");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::filesystem::path(env);
}

std::uint64_t mesh_key(const Discretization& disc, std::size_t count_requested) {
  detail::Fnv1a hash;
  hash.integer(disc.fingerprint());
  hash.integer(count_requested);
  return hash.value();
}

Spectrum cached_eigen_solve(const ModelSpace& space, const Discretization& disc, std::size_t count_requested,
                            std::optional<std::filesystem::path> dir) {
  if (!dir) dir = cache_directory();
  if (!dir) return eigen_solve(space, disc, count_requested);
  const std::uint64_t key = mesh_key(disc, count_requested);
  const auto file = *dir / ("spectrum_" + hex(space.fingerprint()) + "_" + hex(key) + ".bin");
  if (auto hit = read_spectrum(file, space.fingerprint(), key)) return std::move(*hit);
  Spectrum spec = eigen_solve(space, disc, count_requested);
  std::error_code ec;
  std::filesystem::create_directories(*dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create cache directory " + dir->string());
  write_spectrum(file, spec, key);
  return spec;
}

}  // namespace weyl1d
