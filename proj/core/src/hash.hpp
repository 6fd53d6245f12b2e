#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>

namespace weyl1d::detail {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ull;
    }
  }
  void real(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    const auto bits = std::bit_cast<std::uint64_t>(v);
    bytes(&bits, sizeof bits);
  }
  void integer(std::uint64_t v) { bytes(&v, sizeof v); }
  void text(const std::string& s) {
    integer(s.size());
    bytes(s.data(), s.size());
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ull;
};

}  // namespace weyl1d::detail
