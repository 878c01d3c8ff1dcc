#pragma once

// Grayscale images as fields with intensities in [0, 1].
// Formats by extension: .png (8/16 bit gray), .pgm (P2/P5, maxval up to
// 65535) and .tvsf (raw doubles, written unclipped).

#include <filesystem>

#include "tvstokes/field.hpp"

namespace tvs {

// Throws FormatError for unreadable, colour or unsupported files.
ScalarField load_image(const std::filesystem::path& path);

// PNG/PGM output clamps to [0, 1] and quantizes with rounding at the given
// bit depth (8 or 16); TVSF keeps the doubles.
void save_image(const ScalarField& image, const std::filesystem::path& path, int bit_depth = 8);

ScalarField load_png(const std::filesystem::path& path);
void save_png(const ScalarField& image, const std::filesystem::path& path, int bit_depth = 8);
ScalarField load_pgm(const std::filesystem::path& path);
void save_pgm(const ScalarField& image, const std::filesystem::path& path, int bit_depth = 8);

}  // namespace tvs
