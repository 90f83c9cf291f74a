#pragma once

#include <cstdint>
#include <string_view>

namespace ttd {

// Incremental 64-bit FNV-1a.
class Fnv1a {
 public:
  static constexpr uint64_t kOffset = 0xcbf29ce484222325ull;
  static constexpr uint64_t kPrime = 0x100000001b3ull;

  explicit Fnv1a(uint64_t state = kOffset) : h_(state) {}

  void add_bytes(const void* data, size_t n) {
    auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= kPrime;
    }
  }
  void add(std::string_view s) { add_bytes(s.data(), s.size()); }
  // Little-endian, so the result is platform independent.
  void add_u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      unsigned char b = static_cast<unsigned char>(v >> (8 * i));
      add_bytes(&b, 1);
    }
  }
  uint64_t value() const { return h_; }

 private:
  uint64_t h_;
};

}  // namespace ttd
