// time_grid.hpp: Uniform time grid shared by the propagators

#pragma once

#include <cmath>
#include <stdexcept>

namespace ecstate {

struct TimeGrid {
    double t0{0.0};
    double t_end{1.0};
    int steps{1};

    TimeGrid(double t0_, double t_end_, int steps_) : t0(t0_), t_end(t_end_), steps(steps_) {
        if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be positive");
        if (!(t_end > t0) || !std::isfinite(t0) || !std::isfinite(t_end)) {
            throw std::invalid_argument("TimeGrid: t_end must be strictly after t0");
        }
    }

    double dt() const noexcept { return (t_end - t0) / steps; }
    double time(int i) const noexcept { return i == steps ? t_end : t0 + i * dt(); }
    double midpoint(int i) const noexcept { return t0 + (i + 0.5) * dt(); }

    // Same interval, 2× the steps.
    TimeGrid refined() const { return {t0, t_end, 2 * steps}; }
};

}  // namespace ecstate
