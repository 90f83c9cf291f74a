#include "ttd/record/binary_io.hpp"

#include <bit>

namespace ttd::record {

void Writer::f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

uint64_t Reader::get(int n) {
  if (remaining() < static_cast<size_t>(n)) throw IntegrityError("unexpected end of data");
  uint64_t v = 0;
  for (int i = 0; i < n; ++i)
    v |= static_cast<uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
  pos_ += static_cast<size_t>(n);
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

std::string Reader::str() {
  uint64_t n = u64();
  return std::string(raw(n));
}

std::string_view Reader::raw(size_t n) {
  if (remaining() < n) throw IntegrityError("unexpected end of data");
  std::string_view s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

size_t Reader::count(size_t min_element_bytes) {
  uint64_t n = u64();
  if (min_element_bytes > 0 && n > remaining() / min_element_bytes)
    throw IntegrityError("element count " + std::to_string(n) + " exceeds the data");
  return static_cast<size_t>(n);
}

}  // namespace ttd::record
