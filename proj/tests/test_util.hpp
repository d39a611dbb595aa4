#pragma once

#include <cmath>

#include "roughwalk/lift.hpp"
#include "roughwalk/linalg.hpp"
#include "roughwalk/paths.hpp"
#include "roughwalk/rng.hpp"

namespace rwtest {

using roughwalk::JumpPath;
using roughwalk::Mat;
using roughwalk::Rng;
using roughwalk::SampledPath;
using roughwalk::Vec;

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).max_abs(); }

// Matrix exponential by scaling and squaring of the Taylor series; test-side
// oracle for the closed-form OU transition.
inline Mat expm(const Mat& m) {
    const int d = m.d;
    int squarings = 0;
    Mat x = m;
    while (x.max_abs() > 0.5) {
        x *= 0.5;
        ++squarings;
    }
    Mat term = Mat::identity(d);
    Mat sum = Mat::identity(d);
    for (int k = 1; k <= 24; ++k) {
        term = roughwalk::matmul(term, x);
        term *= 1.0 / k;
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = roughwalk::matmul(sum, sum);
    return sum;
}

inline JumpPath random_jump_path(int d, size_t njumps, double horizon, Rng& rng) {
    JumpPath p;
    p.d = d;
    p.horizon = horizon;
    p.start.assign(static_cast<size_t>(d), 0.0);
    double t = 0.0;
    for (size_t k = 0; k < njumps; ++k) {
        t += rng.exponential(static_cast<double>(njumps) / horizon * 1.3);
        if (t >= horizon) break;
        p.times.push_back(t);
        for (int i = 0; i < d; ++i) p.increments.push_back(rng.normal());
    }
    return p;
}

inline SampledPath random_sampled_path(int d, size_t npts, double horizon, Rng& rng,
                                       roughwalk::Interp interp = roughwalk::Interp::PiecewiseLinear) {
    SampledPath p;
    p.d = d;
    p.interp = interp;
    p.times.push_back(0.0);
    for (size_t k = 1; k + 1 < npts; ++k) p.times.push_back(horizon * (k + 0.3 * rng.u01()) / npts);
    p.times.push_back(horizon);
    for (size_t k = 0; k < p.times.size(); ++k)
        for (int i = 0; i < d; ++i) p.values.push_back(rng.normal());
    return p;
}

// Direct windowed left-point sum int_s^t X_{s,u-} (x) dX_u over the jumps of
// the path, the independent route for Chen reconstruction checks.
inline Mat windowed_leftpoint_sum(const JumpPath& path, double s, double t) {
    const int d = path.d;
    Mat out(d);
    Vec x = path.start;
    Vec xs = path.start;
    // value at s
    for (size_t k = 0; k < path.njumps() && path.times[k] <= s; ++k)
        for (int i = 0; i < d; ++i) xs[i] += path.increments[k * d + i];
    x = path.start;
    for (size_t k = 0; k < path.njumps(); ++k) {
        const double tk = path.times[k];
        if (tk <= t && tk > s)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) out(i, j) += (x[i] - xs[i]) * path.increments[k * d + j];
        for (int i = 0; i < d; ++i) x[i] += path.increments[k * d + i];
    }
    return out;
}

}  // namespace rwtest
