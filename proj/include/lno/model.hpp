#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lno/errors.hpp"
#include "lno/legendre.hpp"
#include "lno/ops.hpp"
#include "lno/spectral.hpp"

namespace lno {

/// Architecture hyperparameters. Spatial quantities are in grid points.
struct LnoConfig {
    std::size_t d = 2;            ///< spatial dimensions (1 or 2)
    std::size_t d_u = 2;          ///< physical channels
    std::size_t width = 40;       ///< lifted channels
    std::size_t proj_hidden = 128;
    std::size_t n_blocks = 4;
    std::size_t window = 12;      ///< N
    std::size_t modes = 6;        ///< M per axis
    std::size_t repetitions = 2;  ///< k
    std::size_t half_width = 1;   ///< H, physical kernels are (2H+1)^d
    double dx = 1.0 / 64.0;
    double dt = 0.05;

    std::size_t stride() const noexcept { return window / repetitions; }
    std::size_t kernel_extent() const noexcept { return 2 * half_width + 1; }

    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        if (d != 1 && d != 2) v.push_back("d must be 1 or 2");
        if (d_u == 0) v.push_back("d_u must be positive");
        if (width == 0) v.push_back("width must be positive");
        if (proj_hidden == 0) v.push_back("proj_hidden must be positive");
        if (n_blocks == 0) v.push_back("n_blocks must be at least 1");
        if (window < 2) v.push_back("window N must be at least 2");
        if (repetitions == 0 || (window >= 1 && window % std::max<std::size_t>(repetitions, 1) != 0))
            v.push_back("repetitions k must divide the window N");
        if (modes == 0 || modes > window) v.push_back("modes M must lie in [1, N]");
        if (half_width == 0) v.push_back("half_width H must be at least 1");
        if (!(dx > 0.0)) v.push_back("dx must be positive");
        if (!(dt > 0.0)) v.push_back("dt must be positive");
        return v;
    }

    void validate() const {
        const auto v = violations();
        if (v.empty()) return;
        std::string msg = "invalid LNO config:";
        for (const auto& s : v) msg += " " + s + ";";
        throw ShapeError(msg);
    }
};

/// Per-stage corrosion in grid points: lifting r1, each inner block r2,
/// projection r3, total R = r1 + n*r2 + r3, and local-related range N/k + R.
struct CorrosionReport {
    std::size_t r1 = 0;
    std::size_t r2 = 0;
    std::size_t r3 = 0;
    std::size_t total = 0;
    std::size_t r_min = 0;
};

inline CorrosionReport corrosion(const LnoConfig& c) {
    c.validate();
    CorrosionReport r;
    r.r1 = c.half_width;
    const std::size_t spectral = (c.repetitions - 1) * c.stride();
    r.r2 = std::max(spectral, 2 * c.half_width);
    r.r3 = 0;
    r.total = r.r1 + c.n_blocks * r.r2 + r.r3;
    r.r_min = c.stride() + r.total;
    return r;
}

inline std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= b;
    return r;
}

inline std::size_t count_weights(const LnoConfig& c) {
    c.validate();
    const std::size_t k = ipow(c.kernel_extent(), c.d);
    const std::size_t p = ipow(c.modes, c.d);
    return k * c.d_u * c.width + c.n_blocks * (2 * k * c.width * c.width + c.width * p * p) +
           c.width * c.proj_hidden + c.proj_hidden * c.d_u;
}

class LnoModel {
  public:
    struct Block {
        WeightTensor conv1;
        WeightTensor conv2;
        SpectralLayer spectral;
    };

    LnoModel() = default;

    /// Bias-free weights drawn uniformly in +-(fan_in)^(-1/2), in canonical order.
    static LnoModel build(const LnoConfig& config, std::uint64_t seed) {
        config.validate();
        LnoModel m;
        m.config_ = config;
        m.kernels_ = std::make_shared<const SpectralKernels>(
            make_kernels(config.d, config.window, config.modes));
        const std::size_t ke = config.kernel_extent();
        auto conv_shape = [&](std::size_t cout, std::size_t cin, std::size_t extent) {
            std::vector<std::size_t> s{cout, cin};
            for (std::size_t a = 0; a < config.d; ++a) s.push_back(extent);
            return s;
        };
        m.lifting_ = WeightTensor("lifting", conv_shape(config.width, config.d_u, ke));
        m.blocks_.resize(config.n_blocks);
        for (std::size_t b = 0; b < config.n_blocks; ++b) {
            const std::string tag = "block" + std::to_string(b) + ".";
            m.blocks_[b].conv1 = WeightTensor(tag + "conv1", conv_shape(config.width, config.width, ke));
            m.blocks_[b].conv2 = WeightTensor(tag + "conv2", conv_shape(config.width, config.width, ke));
            m.blocks_[b].spectral =
                SpectralLayer(m.kernels_, config.width, config.repetitions, tag + "spectral_mix");
        }
        m.proj1_ = WeightTensor("proj1", conv_shape(config.proj_hidden, config.width, 1));
        m.proj2_ = WeightTensor("proj2", conv_shape(config.d_u, config.proj_hidden, 1));

        std::mt19937_64 rng(seed);
        for (WeightTensor* w : m.parameters()) {
            const std::size_t fan_in = w->shape.size() == 3 && w->name.ends_with("spectral_mix")
                                           ? w->shape[1]
                                           : w->count() / w->shape[0];
            const double bound = 1.0 / std::sqrt(double(fan_in));
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (double& v : w->values) v = dist(rng);
        }
        return m;
    }

    const LnoConfig& config() const noexcept { return config_; }
    const SpectralKernels& kernels() const noexcept { return *kernels_; }
    std::shared_ptr<const SpectralKernels> kernels_ptr() const noexcept { return kernels_; }
    std::size_t corrosion_width() const { return corrosion(config_).total; }

    /// Canonical order: lifting, per block (conv1, conv2, spectral mix), proj1, proj2.
    std::vector<WeightTensor*> parameters() {
        std::vector<WeightTensor*> p{&lifting_};
        for (Block& b : blocks_) {
            p.push_back(&b.conv1);
            p.push_back(&b.conv2);
            p.push_back(&b.spectral.mix);
        }
        p.push_back(&proj1_);
        p.push_back(&proj2_);
        return p;
    }

    std::vector<const WeightTensor*> parameters() const {
        auto p = const_cast<LnoModel*>(this)->parameters();
        return {p.begin(), p.end()};
    }

    std::size_t weight_count() const {
        std::size_t n = 0;
        for (const WeightTensor* w : parameters()) n += w->count();
        return n;
    }

    void zero_grad() const {
        for (const WeightTensor* w : parameters()) w->zero_grad();
    }

    /// Reason an input extent along one axis is unusable, if any.
    std::optional<std::string> extent_problem(std::size_t extent) const {
        const auto r = corrosion(config_);
        const std::size_t h = config_.half_width;
        const std::size_t n = config_.window;
        const std::size_t s = config_.stride();
        if (extent <= 2 * r.total) return "extent must exceed 2R = " + std::to_string(2 * r.total);
        std::size_t len = extent - 2 * h;
        for (std::size_t b = 0; b < config_.n_blocks; ++b) {
            if (len < n) return "block " + std::to_string(b) + " input shorter than the window";
            if ((len - n) % s != 0)
                return "block " + std::to_string(b) + " input extent " + std::to_string(len) +
                       " minus window " + std::to_string(n) + " is not divisible by stride " +
                       std::to_string(s);
            len -= 2 * r.r2;
        }
        return std::nullopt;
    }

    /// Smallest valid extent at or above `min_extent`.
    std::size_t next_valid_extent(std::size_t min_extent) const {
        for (std::size_t e = min_extent; e < min_extent + 4096; ++e)
            if (!extent_problem(e)) return e;
        throw ShapeError("no valid input extent found near " + std::to_string(min_extent) +
                         " for this configuration");
    }

    void check_input(const GridField& f) const {
        if (f.rank() != config_.d)
            throw ShapeError("model expects rank " + std::to_string(config_.d) + " input, got " +
                             std::to_string(f.rank()));
        if (f.channels() != config_.d_u)
            throw ShapeError("model expects " + std::to_string(config_.d_u) + " channels, got " +
                             std::to_string(f.channels()));
        const std::size_t minimum = next_valid_extent(2 * corrosion_width() + 1);
        for (std::size_t a = 0; a < f.rank(); ++a) {
            const std::size_t e = f.dims()[a];
            if (auto why = extent_problem(e)) {
                std::string msg = std::string("axis ") + axis_name(f.rank(), a) + ": input extent " +
                                  std::to_string(e) + " is invalid (" + *why +
                                  "); minimum valid extent " + std::to_string(minimum);
                if (e >= minimum) msg += ", nearest larger valid extent " + std::to_string(next_valid_extent(e));
                throw ShapeError(msg);
            }
        }
    }

    /// Output extent = input extent - 2R per axis.
    Var forward(Tape& tape, const Var& input) const {
        check_input(input->value);
        const auto r = corrosion(config_);
        const std::size_t rank = config_.d;
        const std::size_t phys = 2 * config_.half_width;
        const std::size_t spec = blocks_.empty() ? 0 : blocks_.front().spectral.corrosion();
        const std::vector<std::size_t> phys_trim(rank, r.r2 - phys);
        const std::vector<std::size_t> spec_trim(rank, r.r2 - spec);

        Var h = conv(tape, input, lifting_);
        for (const Block& b : blocks_) {
            Var p = conv(tape, gelu(tape, conv(tape, h, b.conv1)), b.conv2);
            Var s = spectral_forward(tape, b.spectral, h);
            p = crop(tape, p, phys_trim, phys_trim);
            s = crop(tape, s, spec_trim, spec_trim);
            h = gelu(tape, add(tape, p, s));
        }
        h = gelu(tape, conv(tape, h, proj1_));
        return conv(tape, h, proj2_);
    }

    GridField forward(const GridField& input) const {
        Tape tape(false);
        return forward(tape, tape.input(input))->value;
    }

    // Raw access for checkpoint IO and tests.
    WeightTensor& lifting() { return lifting_; }
    std::vector<Block>& blocks() { return blocks_; }
    WeightTensor& proj1() { return proj1_; }
    WeightTensor& proj2() { return proj2_; }

  private:
    LnoConfig config_;
    std::shared_ptr<const SpectralKernels> kernels_;
    WeightTensor lifting_;
    std::vector<Block> blocks_;
    WeightTensor proj1_;
    WeightTensor proj2_;
};

} // namespace lno
