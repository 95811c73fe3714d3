#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lno/errors.hpp"
#include "lno/ibm.hpp"
#include "lno/model.hpp"
#include "lno/ops.hpp"
#include "lno/trajectory.hpp"

namespace lno {

enum class BoundaryRule { None, Periodic, Constant };

struct BoundarySide {
    BoundaryRule rule = BoundaryRule::None;
    std::vector<double> values; ///< per channel, Constant only
};

/// Per-axis {low, high} padding rules plus the pad width in grid points.
struct BoundarySpec {
    std::vector<std::array<BoundarySide, 2>> axes;
    std::size_t width = 0;

    static BoundarySpec periodic(std::size_t rank, std::size_t width = 0) {
        BoundarySpec s;
        s.axes.assign(rank, {BoundarySide{BoundaryRule::Periodic, {}}, BoundarySide{BoundaryRule::Periodic, {}}});
        s.width = width;
        return s;
    }

    static BoundarySpec constant(std::size_t rank, std::vector<double> values, std::size_t width = 0) {
        BoundarySpec s;
        BoundarySide side{BoundaryRule::Constant, std::move(values)};
        s.axes.assign(rank, {side, side});
        s.width = width;
        return s;
    }

    void validate(std::size_t rank, std::size_t channels) const {
        if (axes.size() != rank)
            throw ShapeError("boundary spec covers " + std::to_string(axes.size()) + " axes, field has " +
                             std::to_string(rank));
        for (std::size_t a = 0; a < rank; ++a) {
            const bool p0 = axes[a][0].rule == BoundaryRule::Periodic;
            const bool p1 = axes[a][1].rule == BoundaryRule::Periodic;
            if (p0 != p1)
                throw ShapeError(std::string("boundary axis ") + axis_name(rank, a) +
                                 ": a periodic side needs a periodic opposite side");
            for (std::size_t s = 0; s < 2; ++s)
                if (axes[a][s].rule == BoundaryRule::Constant && axes[a][s].values.size() != channels)
                    throw ShapeError(std::string("boundary axis ") + axis_name(rank, a) + (s ? "+" : "-") +
                                     ": constant rule needs " + std::to_string(channels) +
                                     " per-channel values, got " + std::to_string(axes[a][s].values.size()));
        }
    }

    bool pads_every_side() const {
        for (const auto& ax : axes)
            for (const auto& s : ax)
                if (s.rule == BoundaryRule::None) return false;
        return true;
    }
};

namespace detail {

inline BoundarySide parse_side_rule(const std::string& rule, const std::string& token) {
    if (rule == "periodic") return {BoundaryRule::Periodic, {}};
    if (rule == "none") return {BoundaryRule::None, {}};
    if (rule.rfind("constant=", 0) == 0) {
        BoundarySide s{BoundaryRule::Constant, {}};
        try {
            s.values.push_back(std::stod(rule.substr(9)));
        } catch (const std::exception&) {
            throw ShapeError("boundary token '" + token + "': bad constant value");
        }
        return s;
    }
    throw ShapeError("boundary token '" + token + "': rule must be periodic, none or constant=v[,v...]");
}

} // namespace detail

/// Parses e.g. "x:periodic,y:constant=1.0,0.0" or per side "x-:constant=0,x+:none".
/// Numbers following a constant rule are further channel values. Every axis of
/// the given rank must be covered.
inline BoundarySpec parse_boundary(const std::string& text, std::size_t rank, std::size_t width = 0) {
    BoundarySpec spec;
    spec.width = width;
    spec.axes.resize(rank);
    std::vector<std::array<bool, 2>> seen(rank, {false, false});
    std::stringstream ss(text);
    std::string token;
    BoundarySide* last[2] = {nullptr, nullptr};
    while (std::getline(ss, token, ',')) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
            if (!last[0]) throw ShapeError("boundary token '" + token + "' is not of the form axis:rule");
            double v;
            try {
                v = std::stod(token);
            } catch (const std::exception&) {
                throw ShapeError("boundary token '" + token + "' is not a number");
            }
            for (BoundarySide* s : last)
                if (s) s->values.push_back(v);
            continue;
        }
        const std::string lhs = token.substr(0, colon);
        const BoundarySide side = detail::parse_side_rule(token.substr(colon + 1), token);
        if (lhs.empty() || (lhs[0] != 'x' && lhs[0] != 'y') || lhs.size() > 2 ||
            (lhs.size() == 2 && lhs[1] != '-' && lhs[1] != '+'))
            throw ShapeError("boundary token '" + token + "': axis must be x, y, x-, x+, y- or y+");
        const std::size_t axis = lhs[0] == 'x' ? 0 : 1;
        if (axis >= rank)
            throw ShapeError("boundary token '" + token + "' names an axis beyond rank " + std::to_string(rank));
        last[0] = last[1] = nullptr;
        for (std::size_t s = 0; s < 2; ++s) {
            if (lhs.size() == 2 && (lhs[1] == '-') != (s == 0)) continue;
            spec.axes[axis][s] = side;
            seen[axis][s] = true;
            last[s] = &spec.axes[axis][s];
        }
    }
    for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t s = 0; s < 2; ++s)
            if (!seen[a][s])
                throw ShapeError(std::string("boundary spec '") + text + "' does not cover axis " +
                                 axis_name(rank, a) + (s ? "+" : "-"));
    return spec;
}

inline std::string to_string(const BoundarySpec& spec) {
    std::string out;
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
        for (std::size_t s = 0; s < 2; ++s) {
            const BoundarySide& b = spec.axes[a][s];
            if (!out.empty()) out += ",";
            out += std::string(axis_name(spec.axes.size(), a)) + (s ? "+" : "-") + ":";
            if (b.rule == BoundaryRule::Periodic) out += "periodic";
            else if (b.rule == BoundaryRule::None) out += "none";
            else {
                out += "constant=";
                for (std::size_t c = 0; c < b.values.size(); ++c) {
                    std::ostringstream v;
                    v.precision(17);
                    v << b.values[c];
                    out += (c ? "," : "") + v.str();
                }
            }
        }
    return out;
}

/// Grows each side by the given widths following the spec; sides with no rule
/// are left alone.
inline Var extend(Tape& tape, const Var& x, const BoundarySpec& spec, const std::vector<std::size_t>& lo,
                  const std::vector<std::size_t>& hi) {
    const GridField& f = x->value;
    spec.validate(f.rank(), f.channels());
    std::vector<PadAxis> axes(f.rank());
    for (std::size_t a = 0; a < f.rank(); ++a)
        for (std::size_t s = 0; s < 2; ++s) {
            const BoundarySide& b = spec.axes[a][s];
            PadSide& p = axes[a][s];
            if (b.rule == BoundaryRule::None) continue;
            p.mode = b.rule == BoundaryRule::Periodic ? PadMode::Periodic : PadMode::Constant;
            p.width = s == 0 ? lo[a] : hi[a];
            p.values = b.values;
        }
    return pad(tape, x, axes);
}

inline GridField extend(const GridField& field, const BoundarySpec& spec) {
    Tape tape(false);
    const std::vector<std::size_t> w(field.rank(), spec.width);
    return extend(tape, tape.input(field), spec, w, w)->value;
}

/// Extra high-side padding per axis so the extended extent satisfies the
/// model's stride constraint; cropped again after the forward pass.
inline std::vector<std::size_t> alignment_padding(const LnoModel& model, const std::vector<std::size_t>& dims) {
    const std::size_t r = model.corrosion_width();
    std::vector<std::size_t> extra(dims.size());
    for (std::size_t a = 0; a < dims.size(); ++a)
        extra[a] = model.next_valid_extent(dims[a] + 2 * r) - (dims[a] + 2 * r);
    return extra;
}

/// One recorded time step: extend by R (plus alignment), forward, crop back to
/// the state's dims.
inline Var march_step(Tape& tape, const LnoModel& model, const Var& state, const BoundarySpec& spec) {
    const GridField& f = state->value;
    if (!spec.pads_every_side())
        throw ShapeError("march needs a periodic or constant rule on every side");
    const std::size_t r = model.corrosion_width();
    const auto extra = alignment_padding(model, f.dims());
    std::vector<std::size_t> lo(f.rank(), r), hi(f.rank());
    for (std::size_t a = 0; a < f.rank(); ++a) hi[a] = r + extra[a];
    Var ext = extend(tape, state, spec, lo, hi);
    Var out = model.forward(tape, ext);
    return crop(tape, out, std::vector<std::size_t>(f.rank(), 0), extra);
}

inline GridField march(const LnoModel& model, const GridField& state, const BoundarySpec& spec,
                       const IbmGeometry* geom = nullptr) {
    Tape tape(false);
    GridField next = march_step(tape, model, tape.input(state), spec)->value;
    if (geom) next = ibm_correct(next, *geom, model.config().dt);
    return next;
}

/// steps+1 frames including the initial state. Throws NumericalError at the
/// first frame holding a non-finite value.
inline Trajectory rollout(const LnoModel& model, const GridField& initial, std::size_t steps,
                          const BoundarySpec& spec, const IbmGeometry* geom = nullptr) {
    if (steps == 0) throw ShapeError("rollout needs at least one step");
    Trajectory t;
    t.dt = model.config().dt;
    t.equation = "lno";
    t.frames.reserve(steps + 1);
    t.frames.push_back(initial);
    for (std::size_t k = 1; k <= steps; ++k) {
        GridField next = march(model, t.frames.back(), spec, geom);
        if (!next.all_finite()) {
            double m = 0.0;
            for (double v : next.values())
                if (std::isfinite(v)) m = std::max(m, std::abs(v));
            throw NumericalError("rollout blew up at step " + std::to_string(k) +
                                 ": non-finite values (max finite |u| = " + std::to_string(m) +
                                 ", previous frame max |u| = " + std::to_string(t.frames.back().max_abs()) + ")");
        }
        t.frames.push_back(std::move(next));
    }
    return t;
}

} // namespace lno
