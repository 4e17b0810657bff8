#pragma once

#include "mmi/tensor.hpp"

namespace mmi::kernels {

/// Kernel execution mode. The parallel variants assign every output element
/// to exactly one thread and keep inner accumulation order fixed, so serial
/// and parallel results are bit-identical; only throughput differs.
enum class Exec { serial, parallel };

Exec execution();
void set_execution(Exec e);
/// Reads MMI_EXEC=serial|parallel (default parallel).
void init_execution_from_env();

// ---- conv2d ------------------------------------------------------------
// x [N,Ci,H,W], w [Co,Ci,kh,kw], optional bias [Co] -> y [N,Co,Ho,Wo]
// with Ho = (H + 2*pad - kh)/stride + 1 (floor), likewise Wo.

void conv2d_out_shape(const Tensor& x, const Tensor& w, int stride, int pad,
                      int& ho, int& wo);

void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias,
                    int stride, int pad, Tensor& y);
void conv2d_backward_input(const Tensor& dy, const Tensor& w, int stride,
                           int pad, Tensor& dx);  // dx pre-shaped, overwritten
void conv2d_backward_weights(const Tensor& x, const Tensor& dy, int stride,
                             int pad, Tensor& dw, Tensor* db);

// Explicit variants, kept separate so tests can compare them directly and
// the benchmark can time them against each other.
void conv2d_forward_serial(const Tensor& x, const Tensor& w, const Tensor* bias,
                           int stride, int pad, Tensor& y);
void conv2d_forward_omp(const Tensor& x, const Tensor& w, const Tensor* bias,
                        int stride, int pad, Tensor& y);
void conv2d_backward_input_serial(const Tensor& dy, const Tensor& w, int stride,
                                  int pad, Tensor& dx);
void conv2d_backward_input_omp(const Tensor& dy, const Tensor& w, int stride,
                               int pad, Tensor& dx);
void conv2d_backward_weights_serial(const Tensor& x, const Tensor& dy, int stride,
                                    int pad, Tensor& dw, Tensor* db);
void conv2d_backward_weights_omp(const Tensor& x, const Tensor& dy, int stride,
                                 int pad, Tensor& dw, Tensor* db);

// ---- separable gaussian blur on a [H,W] plane, reflect border -----------
// radius = ceil(3*sigma), kernel normalized to sum 1.

void gaussian_blur(const Tensor& plane, real sigma, Tensor& out);
void gaussian_blur_serial(const Tensor& plane, real sigma, Tensor& out);
void gaussian_blur_omp(const Tensor& plane, real sigma, Tensor& out);

// ---- binary 3x3 square dilation on a [H,W] plane -------------------------

void dilate3x3(const Tensor& mask, Tensor& out);
void dilate3x3_serial(const Tensor& mask, Tensor& out);
void dilate3x3_omp(const Tensor& mask, Tensor& out);

}  // namespace mmi::kernels
