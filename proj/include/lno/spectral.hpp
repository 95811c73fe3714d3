#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "lno/errors.hpp"
#include "lno/legendre.hpp"
#include "lno/ops.hpp"
#include "lno/reference_tables.hpp"

namespace lno {

/// Windowed Legendre layer: decompose every N-point window (stride s = N/k),
/// mix the M^d coefficients per channel, reconstruct and average the k^d
/// overlapping windows. The output loses (k-1)*s points per side.
struct SpectralLayer {
    std::shared_ptr<const SpectralKernels> kernels;
    WeightTensor mix; ///< [channel][M^d][M^d]
    std::size_t repetitions = 1;

    SpectralLayer() = default;
    SpectralLayer(std::shared_ptr<const SpectralKernels> k, std::size_t channels, std::size_t reps,
                  std::string name = "spectral_mix")
        : kernels(std::move(k)), repetitions(reps) {
        if (!kernels) throw ShapeError("spectral layer needs kernels");
        if (reps == 0 || kernels->window % reps != 0)
            throw ShapeError("repetitions k=" + std::to_string(reps) + " must divide the window N=" +
                             std::to_string(kernels->window));
        const std::size_t p = kernels->mode_count();
        mix = WeightTensor(std::move(name), {channels, p, p});
    }

    std::size_t stride() const noexcept { return kernels->window / repetitions; }
    std::size_t corrosion() const noexcept { return (repetitions - 1) * stride(); }

    void set_identity_mix() {
        const std::size_t p = kernels->mode_count();
        std::fill(mix.values.begin(), mix.values.end(), 0.0);
        for (std::size_t c = 0; c < mix.shape[0]; ++c)
            for (std::size_t m = 0; m < p; ++m) mix.values[(c * p + m) * p + m] = 1.0;
    }
};

inline Var spectral_forward(Tape& tape, const SpectralLayer& layer, const Var& x) {
    const SpectralKernels& k = *layer.kernels;
    if (x->value.rank() != k.rank)
        throw ShapeError("spectral layer of rank " + std::to_string(k.rank) + " applied to a rank " +
                         std::to_string(x->value.rank()) + " field");
    const Plane window = k.window_plane();
    const std::size_t p = k.mode_count();
    Var coeffs = basis_conv(tape, x, k.phi, p, window, layer.stride());
    Var mixed = spectral_mix(tape, coeffs, layer.mix);
    return basis_deconv(tape, mixed, k.psi, p, window, layer.stride(), layer.repetitions);
}

inline GridField spectral_forward(const SpectralLayer& layer, const GridField& input) {
    Tape tape(false);
    return spectral_forward(tape, layer, tape.input(input))->value;
}

/// Largest absolute difference between generated 1-D kernels and the published
/// tables over the first 8 modes; negative when no table exists for the window.
inline double reference_table_deviation(const SpectralKernels& k) {
    const auto view = reference_tables::lookup(k.window);
    if (view.window == 0 || k.rank != 1 || k.modes < reference_tables::kTableModes) return -1.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < k.window; ++i)
        for (std::size_t m = 0; m < reference_tables::kTableModes; ++m) {
            worst = std::max(worst, std::abs(k.phi_at(m, i) - view.phi[i][m]));
            worst = std::max(worst, std::abs(k.psi_at(m, i) - view.psi[i][m]));
        }
    return worst;
}

} // namespace lno
