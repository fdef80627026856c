#pragma once

// FNV-1a 64-bit digests of numeric inputs and outputs, for reproducibility records.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace affine {

class Digest {
 public:
  Digest& bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  Digest& add(double x) {
    if (x == 0.0) x = 0.0;  // -0 and +0 hash alike
    const auto u = std::bit_cast<std::uint64_t>(x);
    return bytes(&u, sizeof u);
  }

  Digest& add(std::int64_t x) { return bytes(&x, sizeof x); }
  Digest& add(std::string_view s) {
    add(static_cast<std::int64_t>(s.size()));
    return bytes(s.data(), s.size());
  }
  Digest& add(std::span<const double> xs) {
    add(static_cast<std::int64_t>(xs.size()));
    for (double x : xs) add(x);
    return *this;
  }

  [[nodiscard]] std::uint64_t value() const noexcept { return h_; }

  [[nodiscard]] std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace affine
