#include "tvstokes/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "tvstokes/errors.hpp"
#include "tvstokes/field_io.hpp"

namespace tvs {

namespace {

std::string lower_ext(const std::filesystem::path& path) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

unsigned quantize(double v, unsigned maxval) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned>(std::lround(c * maxval));
}

void check_depth(int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw FormatError("bit depth must be 8 or 16");
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw FormatError("cannot open " + path.string());
  return f;
}

// libpng reports errors through longjmp; the message is kept for the exception
struct PngError {
  char message[256] = "";
};

void png_fail(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof err->message, "%s", msg);
  png_longjmp(png, 1);
}
void png_warn(png_structp, png_const_charp) {}

// PGM header tokens, skipping comments
std::string pgm_token(std::istream& is) {
  std::string tok;
  char c;
  while (is.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok += c;
  }
  return tok;
}

std::size_t pgm_number(std::istream& is, const std::filesystem::path& path) {
  const std::string tok = pgm_token(is);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw FormatError("malformed PGM header in " + path.string());
  return std::stoul(tok);
}

}  // namespace

ScalarField load_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError(path.string() + " is not a PNG file");

  PngError err;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("png: out of memory");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": " + err.message);
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": only grayscale PNG without alpha is supported");
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 i = 0; i < height; ++i) rows[i] = buffer.data() + i * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ScalarField out(GridSpec{height, width, 1.0});
  for (png_uint_32 i = 0; i < height; ++i)
    for (png_uint_32 j = 0; j < width; ++j) {
      if (depth == 16) {
        const unsigned v = (rows[i][2 * j] << 8) | rows[i][2 * j + 1];
        out(i, j) = v / 65535.0;
      } else {
        out(i, j) = rows[i][j] / 255.0;
      }
    }
  return out;
}

void save_png(const ScalarField& image, const std::filesystem::path& path, int bit_depth) {
  check_depth(bit_depth);
  FilePtr file = open_file(path, "wb");
  PngError err;
  const std::size_t bpp = bit_depth / 8;
  std::vector<png_byte> row(image.cols() * bpp);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw FormatError("png: out of memory");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError(path.string() + ": " + err.message);
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols()), static_cast<png_uint_32>(image.rows()),
               bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t i = 0; i < image.rows(); ++i) {
    for (std::size_t j = 0; j < image.cols(); ++j) {
      if (bit_depth == 16) {
        const unsigned v = quantize(image(i, j), 65535);
        row[2 * j] = static_cast<png_byte>(v >> 8);
        row[2 * j + 1] = static_cast<png_byte>(v & 0xff);
      } else {
        row[j] = static_cast<png_byte>(quantize(image(i, j), 255));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ScalarField load_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  const std::string magic = pgm_token(is);
  if (magic != "P5" && magic != "P2") throw FormatError(path.string() + " is not a grayscale PGM");
  const std::size_t width = pgm_number(is, path);
  const std::size_t height = pgm_number(is, path);
  const std::size_t maxval = pgm_number(is, path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535)
    throw FormatError("unsupported PGM dimensions or maxval in " + path.string());

  ScalarField out(GridSpec{height, width, 1.0});
  const double top = static_cast<double>(maxval);
  if (magic == "P2") {
    for (double& v : out.values()) v = static_cast<double>(pgm_number(is, path)) / top;
    return out;
  }
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(width * height * bpp);
  if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw FormatError("truncated PGM data in " + path.string());
  auto vals = out.values();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const unsigned v = bpp == 2 ? (raw[2 * k] << 8) | raw[2 * k + 1] : raw[k];
    vals[k] = v / top;
  }
  return out;
}

void save_pgm(const ScalarField& image, const std::filesystem::path& path, int bit_depth) {
  check_depth(bit_depth);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  const unsigned maxval = bit_depth == 16 ? 65535 : 255;
  os << "P5\n" << image.cols() << ' ' << image.rows() << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(image.plane_size() * (bit_depth / 8));
  for (double v : image.values()) {
    const unsigned q = quantize(v, maxval);
    if (bit_depth == 16) raw.push_back(static_cast<unsigned char>(q >> 8));
    raw.push_back(static_cast<unsigned char>(q & 0xff));
  }
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

ScalarField load_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm") return load_pgm(path);
  if (ext == ".tvsf") return from_raw<1>(read_tvsf(path));
  throw FormatError("unsupported image format: " + path.string());
}

void save_image(const ScalarField& image, const std::filesystem::path& path, int bit_depth) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return save_png(image, path, bit_depth);
  if (ext == ".pgm") return save_pgm(image, path, bit_depth);
  if (ext == ".tvsf") return write_tvsf(path, to_raw(image));
  throw FormatError("unsupported image format: " + path.string());
}

}  // namespace tvs
