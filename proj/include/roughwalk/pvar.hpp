#pragma once

// Exact p-variation over grid/event points, control-function checks, the
// stopping-time coarsening, and the Lepingle-ratio diagnostic.
//
// Vertex sufficiency: along a linear segment x(w) = (1-w) a + w b the map
// w -> |x(w) - y|^p + |z - x(w)|^p is convex (composition of a convex norm
// with the convex increasing t -> t^p, p >= 1), so it attains its maximum at
// a segment endpoint. Any partition point placed strictly inside a segment
// can therefore be moved to a vertex without decreasing the sum, and the
// supremum over all real partitions equals the maximum over vertex
// partitions. For cadlag step paths the same argument applies with left
// limits at jump times, and the achievable endpoint values are exactly the
// post-jump values. The DP below is hence exact for the path classes this
// toolkit produces.

#include <cstdint>
#include <functional>
#include <vector>

#include "roughwalk/lift.hpp"
#include "roughwalk/paths.hpp"

namespace roughwalk {

enum class PvarMethod { DpExact, BruteForce, DyadicLower };

struct PvarResult {
    double value = 0.0;              // the p-variation norm itself
    std::vector<size_t> partition;   // attaining partition (grid indices, includes 0 and n)
    PvarMethod method = PvarMethod::DpExact;
};

// Dynamic program V(j) = max_{i<j} V(i) + |X_j - X_i|^p over (npts x d) flat
// values. Exact on vertices; p < 1 is rejected. A pruning rule (skip
// predecessors whose best possible contribution cannot beat the incumbent,
// stop once the path diameter bound cannot either) preserves exactness.
PvarResult pvar_grid_dp(const std::vector<double>& values, int d, double p);

// Exhaustive enumeration over all partitions containing both endpoints;
// restricted to <= 20 points. This is the oracle for the DP.
PvarResult pvar_bruteforce(const std::vector<double>& values, int d, double p);

// p/2-level analogue: DP over two-parameter increments |X_{t_i,t_j}|
// (Frobenius norm) recovered through Chen's relation. The increment
// functional is not additive, so the DP maximizes over chains exactly as the
// partition supremum requires.
PvarResult pvar_area(const Level2Lift& lift, double q);
PvarResult pvar_area_bruteforce(const Level2Lift& lift, double q);

// |X_0| + ||X||_p + ||XX||_{p/2}^{1/2}; p >= 2 required.
double rough_norm(const Level2Lift& lift, double p);

struct ControlEvaluation {
    struct Triple {
        size_t r, s, t;
        double defect;  // c(r,s) + c(s,t) - c(r,t), <= 0 for a control
    };
    std::vector<Triple> defects;
    double max_defect = 0.0;
};

// Evaluates superadditivity defects of a two-parameter function given on a
// grid; all triples when their count is at most max_triples, otherwise a
// seeded random sample.
ControlEvaluation control_check(size_t npoints, const std::function<double(size_t, size_t)>& c,
                                size_t max_triples = 200000, uint64_t seed = 0);

// Stopping-time coarsening: tau_0 = 0, tau_{k+1} = first event/grid time with
// |Y_{tau_k, t}| >= 2^{-level}. Returns the skeleton as a pure-jump path; the
// stopping rule is evaluated on the event/grid points.
JumpPath dyadic_skeleton(const JumpPath& path, int level);
JumpPath dyadic_skeleton(const SampledPath& path, int level);

// ||M||_{p,[0,T]}^2 / [M]_T for one pure-jump martingale trajectory, with
// [M]_T = sum |dM|^2. Throws when [M]_T = 0.
double lepingle_ratio(const JumpPath& martingale, double p);

}  // namespace roughwalk
