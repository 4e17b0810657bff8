#include "mmi/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "mmi/errors.hpp"

namespace mmi {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

Image load_png(const std::filesystem::path& file) {
  FilePtr fp(std::fopen(file.string().c_str(), "rb"));
  if (!fp) throw_data("cannot open image file: " + file.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCategory::internal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCategory::internal, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_data("failed to decode PNG: " + file.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_data("unsupported PNG channel count in " + file.string());
  }

  std::vector<png_byte> rowbuf(static_cast<size_t>(w) * channels);
  Image img({channels, static_cast<int>(h), static_cast<int>(w)});
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, rowbuf.data(), nullptr);
    for (png_uint_32 x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c)
        img.at(c, static_cast<int>(y), static_cast<int>(x)) =
            rowbuf[static_cast<size_t>(x) * channels + c] / 255.0;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void save_png(const std::filesystem::path& file, const Image& img) {
  if (img.ndim() != 3 || (img.dim(0) != 1 && img.dim(0) != 3))
    throw_data("save_png: expected [1,H,W] or [3,H,W] image");
  const int C = img.dim(0), H = img.dim(1), W = img.dim(2);

  FilePtr fp(std::fopen(file.string().c_str(), "wb"));
  if (!fp) throw_data("cannot open file for writing: " + file.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCategory::internal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCategory::internal, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw_data("failed to encode PNG: " + file.string());
  }
  png_init_io(png, fp.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(W), static_cast<png_uint_32>(H), 8,
               C == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> rowbuf(static_cast<size_t>(W) * C);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < C; ++c) {
        const real v = std::clamp(img.at(c, y, x), 0.0, 1.0);
        rowbuf[static_cast<size_t>(x) * C + c] =
            static_cast<png_byte>(std::lround(v * 255.0));
      }
    png_write_row(png, rowbuf.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image quantize8(const Image& img) {
  Image out = img;
  for (real& v : out.data)
    v = std::lround(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  return out;
}

Tensor luminance(const Image& img) {
  if (img.ndim() != 3) throw_data("luminance: expected [C,H,W] image");
  const int C = img.dim(0), H = img.dim(1), W = img.dim(2);
  Tensor g({H, W});
  if (C == 1) {
    for (int i = 0; i < H; ++i)
      for (int j = 0; j < W; ++j) g.at(i, j) = img.at(0, i, j);
    return g;
  }
  if (C != 3) throw_data("luminance: expected 1 or 3 channels");
  for (int i = 0; i < H; ++i)
    for (int j = 0; j < W; ++j)
      g.at(i, j) = 0.299 * img.at(0, i, j) + 0.587 * img.at(1, i, j) + 0.114 * img.at(2, i, j);
  return g;
}

Image resize_bilinear(const Image& img, int out_h, int out_w) {
  if (img.ndim() != 3) throw_data("resize_bilinear: expected [C,H,W] image");
  const int C = img.dim(0), H = img.dim(1), W = img.dim(2);
  if (out_h <= 0 || out_w <= 0) throw_data("resize_bilinear: bad output size");
  if (out_h == H && out_w == W) return img;
  Image out({C, out_h, out_w});
  const real sy = static_cast<real>(H) / out_h;
  const real sx = static_cast<real>(W) / out_w;
  for (int c = 0; c < C; ++c)
    for (int i = 0; i < out_h; ++i) {
      // pixel-center alignment
      const real fy = std::clamp((i + 0.5) * sy - 0.5, 0.0, static_cast<real>(H - 1));
      const int y0 = static_cast<int>(fy);
      const int y1 = std::min(y0 + 1, H - 1);
      const real wy = fy - y0;
      for (int j = 0; j < out_w; ++j) {
        const real fx = std::clamp((j + 0.5) * sx - 0.5, 0.0, static_cast<real>(W - 1));
        const int x0 = static_cast<int>(fx);
        const int x1 = std::min(x0 + 1, W - 1);
        const real wx = fx - x0;
        out.at(c, i, j) = (1 - wy) * ((1 - wx) * img.at(c, y0, x0) + wx * img.at(c, y0, x1)) +
                          wy * ((1 - wx) * img.at(c, y1, x0) + wx * img.at(c, y1, x1));
      }
    }
  return out;
}

Tensor resize_nearest_plane(const Tensor& plane, int out_h, int out_w) {
  if (plane.ndim() != 2) throw_data("resize_nearest_plane: expected [H,W] plane");
  const int H = plane.dim(0), W = plane.dim(1);
  if (out_h == H && out_w == W) return plane;
  Tensor out({out_h, out_w});
  for (int i = 0; i < out_h; ++i) {
    const int y = std::min(static_cast<int>((i + 0.5) * H / out_h), H - 1);
    for (int j = 0; j < out_w; ++j) {
      const int x = std::min(static_cast<int>((j + 0.5) * W / out_w), W - 1);
      out.at(i, j) = plane.at(y, x);
    }
  }
  return out;
}

real mean_abs_diff(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw_data("mean_abs_diff: shape mismatch");
  real acc = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<real>(a.size());
}

}  // namespace mmi
