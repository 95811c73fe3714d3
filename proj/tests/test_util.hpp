#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "lno/lno.hpp"

namespace testutil {

inline lno::GridField random_field(std::size_t channels, std::vector<std::size_t> dims, std::uint64_t seed,
                                   double dx = 0.1, double scale = 1.0) {
    lno::GridField f(channels, std::move(dims), dx);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& v : f.values()) v = u(rng);
    return f;
}

inline void randomize(lno::WeightTensor& w, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& v : w.values) v = u(rng);
}

inline double max_diff(const lno::GridField& a, const lno::GridField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

/// Circular shift of every axis by `s` points (out[i] = in[i - s]).
inline lno::GridField roll(const lno::GridField& f, long s) {
    lno::GridField out(f.channels(), f.dims(), f.dx());
    const auto& d = f.dims();
    auto w = [](long i, std::size_t n) { return std::size_t(((i % long(n)) + long(n)) % long(n)); };
    for (std::size_t c = 0; c < f.channels(); ++c) {
        if (f.rank() == 1) {
            for (std::size_t i = 0; i < d[0]; ++i) out.at(c, i) = f.at(c, w(long(i) - s, d[0]));
        } else {
            for (std::size_t i = 0; i < d[0]; ++i)
                for (std::size_t j = 0; j < d[1]; ++j)
                    out.at(c, i, j) = f.at(c, w(long(i) - s, d[0]), w(long(j) - s, d[1]));
        }
    }
    return out;
}

/// Worst relative error between tape gradients and central differences over
/// every entry of `w`; `loss` evaluates the scalar with the current weights.
inline double fd_check(lno::WeightTensor& w, const std::function<double()>& loss, double h = 1e-6,
                       double floor = 1e-8) {
    double worst = 0.0;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        const double keep = w.values[i];
        w.values[i] = keep + h;
        const double up = loss();
        w.values[i] = keep - h;
        const double dn = loss();
        w.values[i] = keep;
        const double fd = (up - dn) / (2 * h);
        const double err = std::abs(fd - w.grad[i]) / std::max({std::abs(fd), std::abs(w.grad[i]), floor});
        worst = std::max(worst, err);
    }
    return worst;
}

} // namespace testutil
