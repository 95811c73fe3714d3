#pragma once

// Thin RAII wrapper over FFTW real-to-complex transforms on 1-D or 2-D grids.

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "lno/errors.hpp"

namespace lno {

class RealFft {
  public:
    /// dims are {n} or {n0, n1}; the half-spectrum has n_last/2 + 1 entries on the last axis.
    explicit RealFft(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        if (dims_.empty() || dims_.size() > 2) throw ShapeError("FFT rank must be 1 or 2");
        real_size_ = 1;
        for (auto d : dims_) real_size_ *= d;
        spec_size_ = real_size_ / dims_.back() * (dims_.back() / 2 + 1);
        real_ = fftw_alloc_real(real_size_);
        spec_ = fftw_alloc_complex(spec_size_);
        std::vector<int> n(dims_.begin(), dims_.end());
        std::lock_guard<std::mutex> lock(planner_mutex());
        // ESTIMATE keeps plans (and hence results) independent of timing.
        forward_ = fftw_plan_dft_r2c(int(n.size()), n.data(), real_, spec_, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r(int(n.size()), n.data(), spec_, real_, FFTW_ESTIMATE);
        if (!forward_ || !backward_) throw NumericalError("FFTW plan creation failed");
    }

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    ~RealFft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    std::size_t real_size() const noexcept { return real_size_; }
    std::size_t spectrum_size() const noexcept { return spec_size_; }
    std::size_t half_cols() const noexcept { return dims_.back() / 2 + 1; }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    void forward(const double* in, std::complex<double>* out) {
        std::copy(in, in + real_size_, real_);
        fftw_execute(forward_);
        auto* s = reinterpret_cast<std::complex<double>*>(spec_);
        std::copy(s, s + spec_size_, out);
    }

    /// Normalised inverse (divides by the point count). The input is not modified.
    void inverse(const std::complex<double>* in, double* out) {
        auto* s = reinterpret_cast<std::complex<double>*>(spec_);
        std::copy(in, in + spec_size_, s);
        fftw_execute(backward_);
        const double scale = 1.0 / double(real_size_);
        for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i] * scale;
    }

  private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    std::vector<std::size_t> dims_;
    std::size_t real_size_ = 0;
    std::size_t spec_size_ = 0;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Signed integer frequency for index i of an n-point transform.
inline long fft_frequency(std::size_t i, std::size_t n) {
    return i <= n / 2 ? long(i) : long(i) - long(n);
}

} // namespace lno
