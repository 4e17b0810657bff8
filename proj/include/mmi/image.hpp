#pragma once

#include <filesystem>
#include <vector>

#include "mmi/tensor.hpp"

namespace mmi {

/// Loads an 8-bit PNG into a [C,H,W] tensor with values k/255.
/// Grayscale files load as C=1, color as C=3 (alpha is dropped).
Image load_png(const std::filesystem::path& file);

/// Saves a [1,H,W] or [3,H,W] image as an 8-bit PNG. Values are clamped to
/// [0,1] and quantized with round(v*255). Only IHDR/IDAT/IEND chunks are
/// written, so identical pixels give identical bytes.
void save_png(const std::filesystem::path& file, const Image& img);

/// round(v*255) clamp, as an in-memory stand-in for a PNG round trip.
Image quantize8(const Image& img);

/// BT.601 luminance of a [3,H,W] image -> [H,W]. A [1,H,W] image passes
/// through as its single plane.
Tensor luminance(const Image& img);

Image resize_bilinear(const Image& img, int out_h, int out_w);
Tensor resize_nearest_plane(const Tensor& plane, int out_h, int out_w);

/// Mean absolute difference across all pixels/channels.
real mean_abs_diff(const Image& a, const Image& b);

}  // namespace mmi
