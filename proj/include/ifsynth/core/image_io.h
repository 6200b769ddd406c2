#pragma once

#include <filesystem>
#include <string>

#include "ifsynth/core/tensor.h"

namespace ifsynth::imgio {

// 16-bit binary PGM (P5, maxval 65535). Values are mapped linearly between
// [0,1] and [0,65535]; out-of-range values are clamped on write.
void write_pgm16(const std::filesystem::path& path, const Tensor& img);
Tensor read_pgm16(const std::filesystem::path& path);

// 8-bit binary PPM (P6) for rendered figures; rgb is {3,H,W} in [0,1].
void write_ppm(const std::filesystem::path& path, const Tensor& rgb);
Tensor read_ppm(const std::filesystem::path& path);

}  // namespace ifsynth::imgio
