#pragma once

#include <string>
#include <vector>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"

namespace lno {

/// Ordered frames sharing channels, dims and dx, spaced dt apart in time.
struct Trajectory {
    std::vector<GridField> frames;
    double dt = 0.0;
    std::string equation;
    double parameter = 0.0; ///< viscosity or wave speed

    std::size_t size() const noexcept { return frames.size(); }
    const GridField& operator[](std::size_t i) const { return frames[i]; }

    void validate() const {
        if (frames.empty()) throw ShapeError("trajectory has no frames");
        if (!(dt > 0.0)) throw ShapeError("trajectory dt must be positive");
        for (std::size_t i = 1; i < frames.size(); ++i)
            if (!frames[i].same_shape(frames[0]) || frames[i].dx() != frames[0].dx())
                throw ShapeError("trajectory frame " + std::to_string(i) + " has shape " +
                                 frames[i].shape_string() + ", expected " + frames[0].shape_string());
    }
};

} // namespace lno
