#pragma once

#include <string>
#include <vector>

#include "logdef/tensor.hpp"

namespace logdef {

// Writes a [3, H, W] RGB tensor with values in [-1, 1] as a PNG.
void save_png(const std::string& path, const Tensor& image);

// Renders 2-D points as a scatter plot PNG (used for toy-backend outputs).
void save_scatter_png(const std::string& path, const std::vector<Tensor>& points, int64_t size = 512,
                      double extent = 6.0);

// True when the file decodes as an image.
bool image_decodable(const std::string& path);

// Peak signal-to-noise ratio in dB between two [-1, 1] images.
double psnr(const Tensor& a, const Tensor& b);

} // namespace logdef
