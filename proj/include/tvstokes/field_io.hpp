#pragma once

// TVSF binary field dump:
//   "TVSF" | u8 channels | u32 n2 | u32 n1 | f64 h | channels*n2*n1 f64
// All multi-byte values little-endian, planes row-major.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tvstokes/field.hpp"

namespace tvs {

struct RawField {
  std::uint8_t channels = 1;
  GridSpec grid;
  std::vector<double> data;
};

void write_tvsf(std::ostream& os, const RawField& f);
RawField read_tvsf(std::istream& is);

void write_tvsf(const std::filesystem::path& path, const RawField& f);
RawField read_tvsf(const std::filesystem::path& path);

template <std::size_t C>
RawField to_raw(const Field<C>& f) {
  return {static_cast<std::uint8_t>(C), f.grid(),
          std::vector<double>(f.values().begin(), f.values().end())};
}

template <std::size_t C>
Field<C> from_raw(RawField raw) {
  if (raw.channels != C) {
    throw FormatError("TVSF has " + std::to_string(raw.channels) + " channels, expected " +
                      std::to_string(C));
  }
  return Field<C>(raw.grid, std::move(raw.data));
}

}  // namespace tvs
