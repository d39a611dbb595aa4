#pragma once

// Level-2 lifts. The second-level tensor is stored only as the running value
// X_{0,t_k} on the event/grid times; two-parameter increments are recovered
// through Chen's relation, which is lossless and keeps storage linear in the
// number of events.

#include <vector>

#include "roughwalk/linalg.hpp"
#include "roughwalk/paths.hpp"

namespace roughwalk {

enum class LiftKind { Ito, StratoLinear };

struct Level2Lift {
    int d = 0;
    LiftKind kind = LiftKind::Ito;
    std::vector<double> times;   // t_0 = 0 < ... < t_m = T
    std::vector<double> values;  // path value at each time, (m+1)*d
    std::vector<double> area;    // running tensor X_{0,t_k}, (m+1)*d*d

    size_t npoints() const { return times.size(); }
    Vec value(size_t k) const {
        return Vec(values.begin() + static_cast<long>(k * d), values.begin() + static_cast<long>((k + 1) * d));
    }
    Mat area_at(size_t k) const {
        Mat m(d);
        const size_t dd = static_cast<size_t>(d) * d;
        for (size_t i = 0; i < dd; ++i) m.a[i] = area[k * dd + i];
        return m;
    }
    // Index of an on-grid time; throws for off-grid queries.
    size_t index_of(double t) const;
};

// Left-point lift of a pure-jump path: the running area at the k-th jump time
// is sum_{i<=k} (X_{t_i-} - X_0) (x) dX_i, constant between jumps.
Level2Lift ito_lift_jump(const JumpPath& path);

// Exact iterated integral of the piecewise-linear interpolant:
// X_{0,t_k} = sum_{i<k} (1/2)(X_{t_i} + X_{t_{i+1}} - 2 X_0) (x) X_{t_i,t_{i+1}}.
Level2Lift strato_lift_linear(const SampledPath& path);

// Left-point Riemann sum on a sample grid.
Level2Lift ito_lift_sampled(const SampledPath& path);

// Running value of (1/2) sum_{jumps <= t} (dX)^{(x)2} at each jump time;
// equals strato_lift_linear(interpolate(path)) - ito_lift_jump(path) there.
struct GapSeries {
    int d = 0;
    std::vector<double> times;
    std::vector<double> gap;  // times.size()*d*d running values
    Mat at(size_t k) const {
        Mat m(d);
        const size_t dd = static_cast<size_t>(d) * d;
        for (size_t i = 0; i < dd; ++i) m.a[i] = gap[k * dd + i];
        return m;
    }
};
GapSeries interpolation_gap(const JumpPath& path);

// Two-parameter increment X_{s,t} = X_{0,t} - X_{0,s} - X_{0,s} (x) X_{s,t}
// for on-grid s <= t.
Mat chen_reconstruct(const Level2Lift& lift, double s, double t);
Mat chen_reconstruct_idx(const Level2Lift& lift, size_t is, size_t it);

// X_{r,t} - X_{r,s} - X_{s,t} - X_{r,s} (x) X_{s,t}; zero for a genuine lift.
Mat chen_defect(const Level2Lift& lift, size_t ir, size_t is, size_t it);

}  // namespace roughwalk
