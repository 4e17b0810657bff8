#include "mmi/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "mmi/errors.hpp"

namespace mmi::kernels {

namespace {
std::atomic<Exec> g_exec{Exec::parallel};
}

Exec execution() { return g_exec.load(std::memory_order_relaxed); }
void set_execution(Exec e) { g_exec.store(e, std::memory_order_relaxed); }

void init_execution_from_env() {
  const char* v = std::getenv("MMI_EXEC");
  if (!v) return;
  std::string s(v);
  if (s == "serial") set_execution(Exec::serial);
  else if (s == "parallel") set_execution(Exec::parallel);
  else throw Error(ErrorCategory::config, "MMI_EXEC must be 'serial' or 'parallel'");
}

void conv2d_out_shape(const Tensor& x, const Tensor& w, int stride, int pad,
                      int& ho, int& wo) {
  if (x.ndim() != 4 || w.ndim() != 4)
    throw_data("conv2d: expected 4-d input and weights");
  if (x.dim(1) != w.dim(1))
    throw_data("conv2d: input channels do not match weight channels");
  ho = (x.dim(2) + 2 * pad - w.dim(2)) / stride + 1;
  wo = (x.dim(3) + 2 * pad - w.dim(3)) / stride + 1;
  if (ho <= 0 || wo <= 0) throw_data("conv2d: kernel larger than padded input");
}

// ---------------------------------------------------------------------------
// Reference (serial) kernels. These are the ground truth the parallel
// variants must reproduce exactly.
// ---------------------------------------------------------------------------

void conv2d_forward_serial(const Tensor& x, const Tensor& w, const Tensor* bias,
                           int stride, int pad, Tensor& y) {
  const int N = x.dim(0), Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int Co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  int Ho, Wo;
  conv2d_out_shape(x, w, stride, pad, Ho, Wo);
  y = Tensor({N, Co, Ho, Wo});
  const real* xp = x.ptr();
  const real* wp = w.ptr();
  real* yp = y.ptr();
  for (int n = 0; n < N; ++n)
    for (int co = 0; co < Co; ++co)
      for (int oh = 0; oh < Ho; ++oh)
        for (int ow = 0; ow < Wo; ++ow) {
          real acc = bias ? (*bias)[co] : 0.0;
          for (int ci = 0; ci < Ci; ++ci)
            for (int r = 0; r < kh; ++r) {
              const int ih = oh * stride - pad + r;
              if (ih < 0 || ih >= H) continue;
              const real* xrow = xp + ((static_cast<int64_t>(n) * Ci + ci) * H + ih) * W;
              const real* wrow = wp + ((static_cast<int64_t>(co) * Ci + ci) * kh + r) * kw;
              for (int c = 0; c < kw; ++c) {
                const int iw = ow * stride - pad + c;
                if (iw < 0 || iw >= W) continue;
                acc += xrow[iw] * wrow[c];
              }
            }
          yp[((static_cast<int64_t>(n) * Co + co) * Ho + oh) * Wo + ow] = acc;
        }
}

void conv2d_backward_input_serial(const Tensor& dy, const Tensor& w, int stride,
                                  int pad, Tensor& dx) {
  const int N = dx.dim(0), Ci = dx.dim(1), H = dx.dim(2), W = dx.dim(3);
  const int Co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int Ho = dy.dim(2), Wo = dy.dim(3);
  const real* dyp = dy.ptr();
  const real* wp = w.ptr();
  real* dxp = dx.ptr();
  for (int n = 0; n < N; ++n)
    for (int ci = 0; ci < Ci; ++ci)
      for (int ih = 0; ih < H; ++ih)
        for (int iw = 0; iw < W; ++iw) {
          real acc = 0.0;
          for (int co = 0; co < Co; ++co)
            for (int r = 0; r < kh; ++r) {
              const int num_h = ih + pad - r;
              if (num_h < 0 || num_h % stride) continue;
              const int oh = num_h / stride;
              if (oh >= Ho) continue;
              const real* dyrow = dyp + ((static_cast<int64_t>(n) * Co + co) * Ho + oh) * Wo;
              const real* wrow = wp + ((static_cast<int64_t>(co) * Ci + ci) * kh + r) * kw;
              for (int c = 0; c < kw; ++c) {
                const int num_w = iw + pad - c;
                if (num_w < 0 || num_w % stride) continue;
                const int ow = num_w / stride;
                if (ow >= Wo) continue;
                acc += dyrow[ow] * wrow[c];
              }
            }
          dxp[((static_cast<int64_t>(n) * Ci + ci) * H + ih) * W + iw] = acc;
        }
}

void conv2d_backward_weights_serial(const Tensor& x, const Tensor& dy, int stride,
                                    int pad, Tensor& dw, Tensor* db) {
  const int N = x.dim(0), Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int Co = dw.dim(0), kh = dw.dim(2), kw = dw.dim(3);
  const int Ho = dy.dim(2), Wo = dy.dim(3);
  const real* xp = x.ptr();
  const real* dyp = dy.ptr();
  real* dwp = dw.ptr();
  for (int co = 0; co < Co; ++co)
    for (int ci = 0; ci < Ci; ++ci)
      for (int r = 0; r < kh; ++r)
        for (int c = 0; c < kw; ++c) {
          real acc = 0.0;
          for (int n = 0; n < N; ++n)
            for (int oh = 0; oh < Ho; ++oh) {
              const int ih = oh * stride - pad + r;
              if (ih < 0 || ih >= H) continue;
              const real* xrow = xp + ((static_cast<int64_t>(n) * Ci + ci) * H + ih) * W;
              const real* dyrow = dyp + ((static_cast<int64_t>(n) * Co + co) * Ho + oh) * Wo;
              for (int ow = 0; ow < Wo; ++ow) {
                const int iw = ow * stride - pad + c;
                if (iw < 0 || iw >= W) continue;
                acc += dyrow[ow] * xrow[iw];
              }
            }
          dwp[((static_cast<int64_t>(co) * Ci + ci) * kh + r) * kw + c] = acc;
        }
  if (db) {
    real* dbp = db->ptr();
    for (int co = 0; co < Co; ++co) {
      real acc = 0.0;
      for (int n = 0; n < N; ++n) {
        const real* dyrow = dyp + (static_cast<int64_t>(n) * Co + co) * Ho * Wo;
        for (int i = 0; i < Ho * Wo; ++i) acc += dyrow[i];
      }
      dbp[co] = acc;
    }
  }
}

// ---------------------------------------------------------------------------
// OpenMP kernels. Parallelism is over output elements only; each accumulator
// is owned by a single thread and summed in the same order as the serial
// reference, so results match it bit for bit.
// ---------------------------------------------------------------------------

void conv2d_forward_omp(const Tensor& x, const Tensor& w, const Tensor* bias,
                        int stride, int pad, Tensor& y) {
  const int N = x.dim(0), Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int Co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  int Ho, Wo;
  conv2d_out_shape(x, w, stride, pad, Ho, Wo);
  y = Tensor({N, Co, Ho, Wo});
  const real* xp = x.ptr();
  const real* wp = w.ptr();
  real* yp = y.ptr();
#pragma omp parallel for collapse(3) schedule(static)
  for (int n = 0; n < N; ++n)
    for (int co = 0; co < Co; ++co)
      for (int oh = 0; oh < Ho; ++oh) {
        real* yrow = yp + ((static_cast<int64_t>(n) * Co + co) * Ho + oh) * Wo;
        for (int ow = 0; ow < Wo; ++ow) {
          real acc = bias ? (*bias)[co] : 0.0;
          for (int ci = 0; ci < Ci; ++ci)
            for (int r = 0; r < kh; ++r) {
              const int ih = oh * stride - pad + r;
              if (ih < 0 || ih >= H) continue;
              const real* xrow = xp + ((static_cast<int64_t>(n) * Ci + ci) * H + ih) * W;
              const real* wrow = wp + ((static_cast<int64_t>(co) * Ci + ci) * kh + r) * kw;
              for (int c = 0; c < kw; ++c) {
                const int iw = ow * stride - pad + c;
                if (iw < 0 || iw >= W) continue;
                acc += xrow[iw] * wrow[c];
              }
            }
          yrow[ow] = acc;
        }
      }
}

void conv2d_backward_input_omp(const Tensor& dy, const Tensor& w, int stride,
                               int pad, Tensor& dx) {
  const int N = dx.dim(0), Ci = dx.dim(1), H = dx.dim(2), W = dx.dim(3);
  const int Co = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const int Ho = dy.dim(2), Wo = dy.dim(3);
  const real* dyp = dy.ptr();
  const real* wp = w.ptr();
  real* dxp = dx.ptr();
#pragma omp parallel for collapse(3) schedule(static)
  for (int n = 0; n < N; ++n)
    for (int ci = 0; ci < Ci; ++ci)
      for (int ih = 0; ih < H; ++ih)
        for (int iw = 0; iw < W; ++iw) {
          real acc = 0.0;
          for (int co = 0; co < Co; ++co)
            for (int r = 0; r < kh; ++r) {
              const int num_h = ih + pad - r;
              if (num_h < 0 || num_h % stride) continue;
              const int oh = num_h / stride;
              if (oh >= Ho) continue;
              const real* dyrow = dyp + ((static_cast<int64_t>(n) * Co + co) * Ho + oh) * Wo;
              const real* wrow = wp + ((static_cast<int64_t>(co) * Ci + ci) * kh + r) * kw;
              for (int c = 0; c < kw; ++c) {
                const int num_w = iw + pad - c;
                if (num_w < 0 || num_w % stride) continue;
                const int ow = num_w / stride;
                if (ow >= Wo) continue;
                acc += dyrow[ow] * wrow[c];
              }
            }
          dxp[((static_cast<int64_t>(n) * Ci + ci) * H + ih) * W + iw] = acc;
        }
}

void conv2d_backward_weights_omp(const Tensor& x, const Tensor& dy, int stride,
                                 int pad, Tensor& dw, Tensor* db) {
  const int N = x.dim(0), Ci = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int Co = dw.dim(0), kh = dw.dim(2), kw = dw.dim(3);
  const int Ho = dy.dim(2), Wo = dy.dim(3);
  const real* xp = x.ptr();
  const real* dyp = dy.ptr();
  real* dwp = dw.ptr();
#pragma omp parallel for collapse(2) schedule(static)
  for (int co = 0; co < Co; ++co)
    for (int ci = 0; ci < Ci; ++ci)
      for (int r = 0; r < kh; ++r)
        for (int c = 0; c < kw; ++c) {
          real acc = 0.0;
          for (int n = 0; n < N; ++n)
            for (int oh = 0; oh < Ho; ++oh) {
              const int ih = oh * stride - pad + r;
              if (ih < 0 || ih >= H) continue;
              const real* xrow = xp + ((static_cast<int64_t>(n) * Ci + ci) * H + ih) * W;
              const real* dyrow = dyp + ((static_cast<int64_t>(n) * Co + co) * Ho + oh) * Wo;
              for (int ow = 0; ow < Wo; ++ow) {
                const int iw = ow * stride - pad + c;
                if (iw < 0 || iw >= W) continue;
                acc += dyrow[ow] * xrow[iw];
              }
            }
          dwp[((static_cast<int64_t>(co) * Ci + ci) * kh + r) * kw + c] = acc;
        }
  if (db) {
    real* dbp = db->ptr();
#pragma omp parallel for schedule(static)
    for (int co = 0; co < Co; ++co) {
      real acc = 0.0;
      for (int n = 0; n < N; ++n) {
        const real* dyrow = dyp + (static_cast<int64_t>(n) * Co + co) * Ho * Wo;
        for (int i = 0; i < Ho * Wo; ++i) acc += dyrow[i];
      }
      dbp[co] = acc;
    }
  }
}

// ---------------------------------------------------------------------------
// Gaussian blur, separable with reflect border.
// ---------------------------------------------------------------------------

namespace {

std::vector<real> gauss_kernel(real sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<real> k(static_cast<size_t>(2 * r + 1));
  real sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<size_t>(i + r)] = std::exp(-static_cast<real>(i) * i / (2.0 * sigma * sigma));
    sum += k[static_cast<size_t>(i + r)];
  }
  for (real& v : k) v /= sum;
  return k;
}

inline int reflect(int i, int n) {
  // mirror without repeating the border sample, e.g. -1 -> 1, n -> n-2
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

template <bool Parallel>
void gaussian_blur_impl(const Tensor& plane, real sigma, Tensor& out) {
  if (plane.ndim() != 2) throw_data("gaussian_blur: expected [H,W] plane");
  if (!(sigma > 0.0)) throw_data("gaussian_blur: sigma must be positive");
  const int H = plane.dim(0), W = plane.dim(1);
  const std::vector<real> k = gauss_kernel(sigma);
  const int r = (static_cast<int>(k.size()) - 1) / 2;
  Tensor tmp({H, W});
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < H; ++i)
    for (int j = 0; j < W; ++j) {
      real acc = 0.0;
      for (int t = -r; t <= r; ++t)
        acc += plane.at(i, reflect(j + t, W)) * k[static_cast<size_t>(t + r)];
      tmp.at(i, j) = acc;
    }
  out = Tensor({H, W});
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < H; ++i)
    for (int j = 0; j < W; ++j) {
      real acc = 0.0;
      for (int t = -r; t <= r; ++t)
        acc += tmp.at(reflect(i + t, H), j) * k[static_cast<size_t>(t + r)];
      out.at(i, j) = acc;
    }
}

}  // namespace

void gaussian_blur_serial(const Tensor& plane, real sigma, Tensor& out) {
  gaussian_blur_impl<false>(plane, sigma, out);
}
void gaussian_blur_omp(const Tensor& plane, real sigma, Tensor& out) {
  gaussian_blur_impl<true>(plane, sigma, out);
}

// ---------------------------------------------------------------------------
// 3x3 binary dilation.
// ---------------------------------------------------------------------------

namespace {
template <bool Parallel>
void dilate3x3_impl(const Tensor& mask, Tensor& out) {
  if (mask.ndim() != 2) throw_data("dilate3x3: expected [H,W] mask");
  const int H = mask.dim(0), W = mask.dim(1);
  out = Tensor({H, W});
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < H; ++i)
    for (int j = 0; j < W; ++j) {
      real v = 0.0;
      for (int di = -1; di <= 1 && v == 0.0; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if (a < 0 || a >= H || b < 0 || b >= W) continue;
          if (mask.at(a, b) != 0.0) {
            v = 1.0;
            break;
          }
        }
      out.at(i, j) = v;
    }
}
}  // namespace

void dilate3x3_serial(const Tensor& mask, Tensor& out) { dilate3x3_impl<false>(mask, out); }
void dilate3x3_omp(const Tensor& mask, Tensor& out) { dilate3x3_impl<true>(mask, out); }

// ---------------------------------------------------------------------------
// Dispatch.
// ---------------------------------------------------------------------------

void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad, Tensor& y) {
  execution() == Exec::parallel ? conv2d_forward_omp(x, w, bias, stride, pad, y)
                                : conv2d_forward_serial(x, w, bias, stride, pad, y);
}
void conv2d_backward_input(const Tensor& dy, const Tensor& w, int stride,
                           int pad, Tensor& dx) {
  execution() == Exec::parallel ? conv2d_backward_input_omp(dy, w, stride, pad, dx)
                                : conv2d_backward_input_serial(dy, w, stride, pad, dx);
}
void conv2d_backward_weights(const Tensor& x, const Tensor& dy, int stride,
                             int pad, Tensor& dw, Tensor* db) {
  execution() == Exec::parallel ? conv2d_backward_weights_omp(x, dy, stride, pad, dw, db)
                                : conv2d_backward_weights_serial(x, dy, stride, pad, dw, db);
}
void gaussian_blur(const Tensor& plane, real sigma, Tensor& out) {
  execution() == Exec::parallel ? gaussian_blur_omp(plane, sigma, out)
                                : gaussian_blur_serial(plane, sigma, out);
}
void dilate3x3(const Tensor& mask, Tensor& out) {
  execution() == Exec::parallel ? dilate3x3_omp(mask, out)
                                : dilate3x3_serial(mask, out);
}

}  // namespace mmi::kernels
