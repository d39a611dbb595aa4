#pragma once

// Path containers. JumpPath is a cadlag piecewise-constant path stored as
// increments (values are materialized on demand); SampledPath is a path on a
// strictly increasing time grid, read either as linear interpolant or as raw
// grid samples.

#include <string>
#include <vector>

#include "roughwalk/linalg.hpp"

namespace roughwalk {

enum class Interp { PiecewiseLinear, GridSamples };

struct SampledPath {
    int d = 0;
    Interp interp = Interp::GridSamples;
    std::vector<double> times;   // t_0 = 0 < ... < t_n = T
    std::vector<double> values;  // (n+1)*d, row-major

    size_t npoints() const { return times.size(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    const double* value_ptr(size_t k) const { return values.data() + k * d; }
    Vec value(size_t k) const {
        return Vec(values.begin() + static_cast<long>(k * d), values.begin() + static_cast<long>((k + 1) * d));
    }
    // Linear-interpolant evaluation (requires Interp::PiecewiseLinear).
    Vec eval(double t) const;
    void validate() const;
};

struct JumpPath {
    int d = 0;
    double horizon = 0.0;
    Vec start;                       // value at time 0
    std::vector<double> times;       // jump times, strictly increasing, in (0, T]
    std::vector<double> increments;  // njumps*d, row-major

    size_t njumps() const { return times.size(); }
    const double* increment_ptr(size_t k) const { return increments.data() + k * d; }
    // Cadlag value at t (includes jumps at times <= t).
    Vec value_at(double t) const;
    Vec final_value() const { return value_at(horizon); }
    void validate() const;
};

// Piecewise-linear path through the jump skeleton: grid {0, jump times..., T},
// values are the post-jump values.
SampledPath interpolate(const JumpPath& path);

// Values of the jump path at {0, jump times...}, post-jump, flattened.
std::vector<double> event_values(const JumpPath& path);

// X^n_t = n^{-1/2} X_{nt}. The result lives on [0, horizon/n]. When
// target_horizon > 0, throws if the input horizon is shorter than
// n*target_horizon.
JumpPath diffusive_rescale(const JumpPath& path, double n, double target_horizon = 0.0);
SampledPath diffusive_rescale(const SampledPath& path, double n, double target_horizon = 0.0);

}  // namespace roughwalk
