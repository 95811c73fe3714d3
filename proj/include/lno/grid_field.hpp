#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lno/errors.hpp"

namespace lno {

/// Two-axis view of a 1-D or 2-D extent. A 1-D extent L is viewed as 1 x L so
/// every kernel loop runs the same code for both ranks.
struct Plane {
    std::size_t rows = 1;
    std::size_t cols = 1;

    std::size_t size() const noexcept { return rows * cols; }
    bool operator==(const Plane&) const = default;
};

inline Plane plane_of(const std::vector<std::size_t>& dims) {
    if (dims.size() == 1) return {1, dims[0]};
    if (dims.size() == 2) return {dims[0], dims[1]};
    throw ShapeError("grid rank must be 1 or 2, got " + std::to_string(dims.size()));
}

inline std::vector<std::size_t> dims_of(Plane p, std::size_t rank) {
    if (rank == 1) return {p.cols};
    return {p.rows, p.cols};
}

inline const char* axis_name(std::size_t rank, std::size_t axis) {
    static const char* names[] = {"x", "y"};
    (void)rank;
    return axis < 2 ? names[axis] : "?";
}

/// Multi-channel sample of a function on an equidistant 1-D or 2-D grid.
/// Storage is channel-major, then row-major over the grid axes (axis 0 = x).
class GridField {
  public:
    GridField() = default;

    GridField(std::size_t channels, std::vector<std::size_t> dims, double dx)
        : channels_(channels), dims_(std::move(dims)), dx_(dx) {
        if (channels_ == 0) throw ShapeError("GridField needs at least one channel");
        if (dims_.empty() || dims_.size() > 2)
            throw ShapeError("GridField rank must be 1 or 2");
        for (std::size_t a = 0; a < dims_.size(); ++a)
            if (dims_[a] == 0)
                throw ShapeError(std::string("GridField axis ") + axis_name(dims_.size(), a) +
                                 " has zero points");
        if (!(dx_ > 0.0)) throw ShapeError("GridField spacing dx must be positive");
        values_.assign(channels_ * points(), 0.0);
    }

    GridField(std::size_t channels, std::vector<std::size_t> dims, double dx,
              std::vector<double> values)
        : GridField(channels, std::move(dims), dx) {
        if (values.size() != values_.size())
            throw ShapeError("GridField value count " + std::to_string(values.size()) +
                             " does not match " + std::to_string(values_.size()));
        values_ = std::move(values);
    }

    std::size_t channels() const noexcept { return channels_; }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t rank() const noexcept { return dims_.size(); }
    double dx() const noexcept { return dx_; }
    Plane plane() const { return plane_of(dims_); }

    std::size_t points() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
    }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& storage() noexcept { return values_; }
    const std::vector<double>& storage() const noexcept { return values_; }

    std::span<double> channel(std::size_t c) { return {values_.data() + c * points(), points()}; }
    std::span<const double> channel(std::size_t c) const {
        return {values_.data() + c * points(), points()};
    }

    double& at(std::size_t c, std::size_t i) { return values_[c * points() + i]; }
    double at(std::size_t c, std::size_t i) const { return values_[c * points() + i]; }
    double& at(std::size_t c, std::size_t i, std::size_t j) {
        return values_[(c * dims_[0] + i) * dims_[1] + j];
    }
    double at(std::size_t c, std::size_t i, std::size_t j) const {
        return values_[(c * dims_[0] + i) * dims_[1] + j];
    }

    bool same_shape(const GridField& o) const noexcept {
        return channels_ == o.channels_ && dims_ == o.dims_;
    }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

    std::string shape_string() const {
        std::string s = std::to_string(channels_) + "x[";
        for (std::size_t a = 0; a < dims_.size(); ++a)
            s += (a ? "," : "") + std::to_string(dims_[a]);
        return s + "]";
    }

  private:
    std::size_t channels_ = 0;
    std::vector<std::size_t> dims_;
    double dx_ = 1.0;
    std::vector<double> values_;
};

/// Learnable weights. `grad` is the accumulator filled by Tape::backward; it is
/// only written while a recording tape replays adjoints.
struct WeightTensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;
    bool requires_grad = true;
    mutable std::vector<double> grad;

    WeightTensor() = default;
    WeightTensor(std::string n, std::vector<std::size_t> s, bool trainable = true)
        : name(std::move(n)), shape(std::move(s)), requires_grad(trainable) {
        values.assign(count(), 0.0);
        if (requires_grad) grad.assign(values.size(), 0.0);
    }

    std::size_t count() const noexcept {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    }

    void zero_grad() const {
        if (requires_grad) grad.assign(values.size(), 0.0);
    }
};

} // namespace lno
