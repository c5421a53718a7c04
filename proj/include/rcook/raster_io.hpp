#pragma once

#include <filesystem>

#include "rcook/types.hpp"

namespace rcook {

// Matrix container: magic "CCMX1\0", then rows, cols, bands as u32 LE,
// then rows*cols*bands f64 LE values band-interleaved by pixel (row-major).
PixelMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const PixelMatrix& m, const std::filesystem::path& path);

// Binary PGM (P5, maxval <= 255); nonzero pixel <=> true.
Mask load_mask(const std::filesystem::path& path);
void save_mask(const Mask& m, const std::filesystem::path& path);

// 8-bit grayscale PGM; scores mapped affinely so min -> 0 and max -> 255
// (round half up). A constant map renders as all zeros.
void save_heatmap(const ScoreMap& s, const std::filesystem::path& path);

// Score maps ride the matrix container with bands = 1.
ScoreMap load_scores(const std::filesystem::path& path);
void save_scores(const ScoreMap& s, const std::filesystem::path& path);

}  // namespace rcook
