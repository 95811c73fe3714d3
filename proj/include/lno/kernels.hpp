#pragma once

// Direct-loop convolution kernels on the canonical two-axis view. All routines
// accumulate (+=) into their destination; callers zero it when needed.

#include <cmath>
#include <cstddef>
#include <numbers>

#include "lno/grid_field.hpp"

namespace lno::kernels {

struct ConvGeometry {
    std::size_t cin = 1;
    std::size_t cout = 1;
    Plane in;
    Plane kernel;
    Plane stride;
    Plane out;
};

/// Valid cross-correlation output extent; the caller checks divisibility.
inline Plane valid_extent(Plane in, Plane k, Plane s) {
    return {(in.rows - k.rows) / s.rows + 1, (in.cols - k.cols) / s.cols + 1};
}

/// out[o] += sum_c sum_ab w[o][c][a][b] * in[c][y*sr + a][x*sc + b]
inline void conv_forward(const double* in, const double* w, const ConvGeometry& g, double* out) {
    const std::size_t in_plane = g.in.size();
    const std::size_t out_plane = g.out.size();
    for (std::size_t o = 0; o < g.cout; ++o) {
        for (std::size_t c = 0; c < g.cin; ++c) {
            for (std::size_t a = 0; a < g.kernel.rows; ++a) {
                for (std::size_t b = 0; b < g.kernel.cols; ++b) {
                    const double wv = w[((o * g.cin + c) * g.kernel.rows + a) * g.kernel.cols + b];
                    if (wv == 0.0) continue;
                    for (std::size_t y = 0; y < g.out.rows; ++y) {
                        const double* src = in + c * in_plane + (y * g.stride.rows + a) * g.in.cols + b;
                        double* dst = out + o * out_plane + y * g.out.cols;
                        if (g.stride.cols == 1) {
                            for (std::size_t x = 0; x < g.out.cols; ++x) dst[x] += wv * src[x];
                        } else {
                            for (std::size_t x = 0; x < g.out.cols; ++x)
                                dst[x] += wv * src[x * g.stride.cols];
                        }
                    }
                }
            }
        }
    }
}

inline void conv_backward_input(const double* gout, const double* w, const ConvGeometry& g,
                                double* gin) {
    const std::size_t in_plane = g.in.size();
    const std::size_t out_plane = g.out.size();
    for (std::size_t o = 0; o < g.cout; ++o) {
        for (std::size_t c = 0; c < g.cin; ++c) {
            for (std::size_t a = 0; a < g.kernel.rows; ++a) {
                for (std::size_t b = 0; b < g.kernel.cols; ++b) {
                    const double wv = w[((o * g.cin + c) * g.kernel.rows + a) * g.kernel.cols + b];
                    if (wv == 0.0) continue;
                    for (std::size_t y = 0; y < g.out.rows; ++y) {
                        double* dst = gin + c * in_plane + (y * g.stride.rows + a) * g.in.cols + b;
                        const double* src = gout + o * out_plane + y * g.out.cols;
                        if (g.stride.cols == 1) {
                            for (std::size_t x = 0; x < g.out.cols; ++x) dst[x] += wv * src[x];
                        } else {
                            for (std::size_t x = 0; x < g.out.cols; ++x)
                                dst[x * g.stride.cols] += wv * src[x];
                        }
                    }
                }
            }
        }
    }
}

inline void conv_backward_weight(const double* gout, const double* in, const ConvGeometry& g,
                                 double* gw) {
    const std::size_t in_plane = g.in.size();
    const std::size_t out_plane = g.out.size();
    for (std::size_t o = 0; o < g.cout; ++o) {
        for (std::size_t c = 0; c < g.cin; ++c) {
            for (std::size_t a = 0; a < g.kernel.rows; ++a) {
                for (std::size_t b = 0; b < g.kernel.cols; ++b) {
                    double acc = 0.0;
                    for (std::size_t y = 0; y < g.out.rows; ++y) {
                        const double* src = in + c * in_plane + (y * g.stride.rows + a) * g.in.cols + b;
                        const double* go = gout + o * out_plane + y * g.out.cols;
                        if (g.stride.cols == 1) {
                            for (std::size_t x = 0; x < g.out.cols; ++x) acc += go[x] * src[x];
                        } else {
                            for (std::size_t x = 0; x < g.out.cols; ++x)
                                acc += go[x] * src[x * g.stride.cols];
                        }
                    }
                    gw[((o * g.cin + c) * g.kernel.rows + a) * g.kernel.cols + b] += acc;
                }
            }
        }
    }
}

/// Transposed convolution over the full output extent (W-1)*s + k per axis.
/// Here `in` is the coefficient field (g.in), `out` the physical field (g.out),
/// and the kernel layout is [cin][cout][a][b].
/// out[o][y*sr + a][x*sc + b] += scale * w[i][o][a][b] * in[i][y][x]
inline void deconv_forward(const double* in, const double* w, double scale, const ConvGeometry& g,
                           double* out) {
    const std::size_t in_plane = g.in.size();
    const std::size_t out_plane = g.out.size();
    for (std::size_t i = 0; i < g.cin; ++i) {
        for (std::size_t o = 0; o < g.cout; ++o) {
            for (std::size_t a = 0; a < g.kernel.rows; ++a) {
                for (std::size_t b = 0; b < g.kernel.cols; ++b) {
                    const double wv =
                        scale * w[((i * g.cout + o) * g.kernel.rows + a) * g.kernel.cols + b];
                    if (wv == 0.0) continue;
                    for (std::size_t y = 0; y < g.in.rows; ++y) {
                        double* dst = out + o * out_plane + (y * g.stride.rows + a) * g.out.cols + b;
                        const double* src = in + i * in_plane + y * g.in.cols;
                        for (std::size_t x = 0; x < g.in.cols; ++x) dst[x * g.stride.cols] += wv * src[x];
                    }
                }
            }
        }
    }
}

inline void deconv_backward_input(const double* gout, const double* w, double scale,
                                  const ConvGeometry& g, double* gin) {
    const std::size_t in_plane = g.in.size();
    const std::size_t out_plane = g.out.size();
    for (std::size_t i = 0; i < g.cin; ++i) {
        for (std::size_t o = 0; o < g.cout; ++o) {
            for (std::size_t a = 0; a < g.kernel.rows; ++a) {
                for (std::size_t b = 0; b < g.kernel.cols; ++b) {
                    const double wv =
                        scale * w[((i * g.cout + o) * g.kernel.rows + a) * g.kernel.cols + b];
                    if (wv == 0.0) continue;
                    for (std::size_t y = 0; y < g.in.rows; ++y) {
                        const double* src =
                            gout + o * out_plane + (y * g.stride.rows + a) * g.out.cols + b;
                        double* dst = gin + i * in_plane + y * g.in.cols;
                        for (std::size_t x = 0; x < g.in.cols; ++x) dst[x] += wv * src[x * g.stride.cols];
                    }
                }
            }
        }
    }
}

inline void deconv_backward_weight(const double* gout, const double* in, double scale,
                                   const ConvGeometry& g, double* gw) {
    const std::size_t in_plane = g.in.size();
    const std::size_t out_plane = g.out.size();
    for (std::size_t i = 0; i < g.cin; ++i) {
        for (std::size_t o = 0; o < g.cout; ++o) {
            for (std::size_t a = 0; a < g.kernel.rows; ++a) {
                for (std::size_t b = 0; b < g.kernel.cols; ++b) {
                    double acc = 0.0;
                    for (std::size_t y = 0; y < g.in.rows; ++y) {
                        const double* go =
                            gout + o * out_plane + (y * g.stride.rows + a) * g.out.cols + b;
                        const double* src = in + i * in_plane + y * g.in.cols;
                        for (std::size_t x = 0; x < g.in.cols; ++x) acc += src[x] * go[x * g.stride.cols];
                    }
                    gw[((i * g.cout + o) * g.kernel.rows + a) * g.kernel.cols + b] += scale * acc;
                }
            }
        }
    }
}

inline constexpr double kGeluCubic = 0.044715;

/// tanh-form GELU: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))
inline double gelu(double x) {
    const double c = std::sqrt(2.0 / std::numbers::pi);
    return 0.5 * x * (1.0 + std::tanh(c * (x + kGeluCubic * x * x * x)));
}

inline double gelu_derivative(double x) {
    const double c = std::sqrt(2.0 / std::numbers::pi);
    const double t = std::tanh(c * (x + kGeluCubic * x * x * x));
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * c * (1.0 + 3.0 * kGeluCubic * x * x);
}

} // namespace lno::kernels
