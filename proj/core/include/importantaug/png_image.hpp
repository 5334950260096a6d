// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace importantaug {

// 8-bit grayscale raster, row 0 at the top, row-major pixels.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  uint8_t at(int row, int col) const {
    return pixels[static_cast<size_t>(row) * static_cast<size_t>(width) +
                  static_cast<size_t>(col)];
  }
};

// Minimal PNG codec for 8-bit grayscale, non-interlaced images — all the
// toolkit emits. Writing uses filter type 0 with a fixed zlib level, so the
// bytes are reproducible; reading handles all five scanline filters.
void write_png_gray8(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_png_gray8(const std::filesystem::path& path);

}  // namespace importantaug
