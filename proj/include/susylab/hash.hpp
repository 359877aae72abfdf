#pragma once
#include <cstdint>
#include <cstring>
#include <string_view>

namespace susylab {

// FNV-1a, 64 bit.
class Fnv1a {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      h_ ^= c[k];
      h_ *= 0x100000001b3ull;
    }
  }
  void text(std::string_view s) { bytes(s.data(), s.size()); }
  template <class T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace susylab
