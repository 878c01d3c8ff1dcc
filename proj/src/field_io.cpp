#include "tvstokes/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tvs {
namespace {

constexpr char kMagic[4] = {'T', 'V', 'S', 'F'};

template <typename T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw FormatError("truncated TVSF stream");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_tvsf(std::ostream& os, const RawField& f) {
  if (f.data.size() != f.channels * f.grid.size()) {
    throw ShapeError("TVSF payload does not match header");
  }
  os.write(kMagic, 4);
  put_le<std::uint8_t>(os, f.channels);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.rows));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.cols));
  put_le<double>(os, f.grid.h);
  for (double v : f.data) put_le<double>(os, v);
  if (!os) throw FormatError("failed writing TVSF stream");
}

RawField read_tvsf(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not a TVSF stream (bad magic)");
  }
  RawField f;
  f.channels = get_le<std::uint8_t>(is);
  if (f.channels == 0) throw FormatError("TVSF with zero channels");
  f.grid.rows = get_le<std::uint32_t>(is);
  f.grid.cols = get_le<std::uint32_t>(is);
  f.grid.h = get_le<double>(is);
  try {
    f.grid.validate();
  } catch (const ShapeError& e) {
    throw FormatError(std::string("bad TVSF header: ") + e.what());
  }
  f.data.resize(f.channels * f.grid.size());
  for (double& v : f.data) v = get_le<double>(is);
  return f;
}

void write_tvsf(const std::filesystem::path& path, const RawField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_tvsf(os, f);
}

RawField read_tvsf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_tvsf(is);
}

}  // namespace tvs
