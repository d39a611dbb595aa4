#include "roughwalk/pvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "roughwalk/rng.hpp"

namespace roughwalk {

namespace {

double dist2(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double x = b[i] - a[i];
        s += x * x;
    }
    return s;
}

std::vector<size_t> chain_from_parents(const std::vector<size_t>& parent) {
    std::vector<size_t> chain;
    size_t j = parent.size() - 1;
    chain.push_back(j);
    while (j != 0) {
        j = parent[j];
        chain.push_back(j);
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

// Shared DP over an arbitrary squared-increment functional. incr2(i,j) must
// return |increment between grid points i<j|^2; diam2 is a global upper bound
// for it. Exactness of the pruning: V is non-decreasing (i is an admissible
// predecessor of any j > i with nonnegative contribution), so once
// V(i) + diam^p cannot beat the incumbent no smaller i can either. Between
// exact threshold evaluations the cached rejection radius only understates
// the true one, which can only cause extra exact checks, never a miss.
template <typename Incr2>
PvarResult dp_generic(size_t npts, double p, Incr2 incr2, double diam2) {
    PvarResult res;
    res.method = PvarMethod::DpExact;
    if (npts == 0) throw std::invalid_argument("pvar: need at least one point");
    if (npts == 1) {
        res.partition = {0};
        return res;
    }
    const double half_p = 0.5 * p;
    const double diam_p = diam2 > 0.0 ? std::pow(diam2, half_p) : 0.0;

    std::vector<double> v(npts, 0.0);
    std::vector<size_t> parent(npts, 0);
    for (size_t j = 1; j < npts; ++j) {
        size_t arg = j - 1;
        double d2 = incr2(j - 1, j);
        double best = v[j - 1] + (d2 > 0.0 ? std::pow(d2, half_p) : 0.0);
        // Rejection radius in squared-increment units, recomputed lazily. It
        // is exact for the i where it was last evaluated and a lower bound
        // for all smaller i.
        double r2 = 0.0;
        if (j >= 2)
            for (size_t i = j - 1; i-- > 0;) {
                if (v[i] + diam_p <= best) break;
                d2 = incr2(i, j);
                if (d2 <= r2) continue;
                const double gain = best - v[i];
                const double r2i = gain > 0.0 ? std::pow(gain, 2.0 / p) : 0.0;
                if (d2 <= r2i) {
                    r2 = r2i;
                    continue;
                }
                const double cand = v[i] + std::pow(d2, half_p);
                if (cand > best) {
                    best = cand;
                    arg = i;
                    r2 = 0.0;
                } else {
                    r2 = r2i;
                }
            }
        v[j] = best;
        parent[j] = arg;
    }
    res.value = std::pow(v[npts - 1], 1.0 / p);
    res.partition = chain_from_parents(parent);
    return res;
}

template <typename Incr2>
PvarResult brute_generic(size_t npts, double p, Incr2 incr2, PvarMethod tag) {
    if (npts == 0) throw std::invalid_argument("pvar: need at least one point");
    if (npts > 20) throw std::invalid_argument("pvar_bruteforce: more than 20 points");
    PvarResult res;
    res.method = tag;
    if (npts == 1) {
        res.partition = {0};
        return res;
    }
    const size_t interior = npts - 2;
    const uint64_t subsets = 1ULL << interior;
    double best = -1.0;
    uint64_t best_mask = 0;
    std::vector<size_t> pts;
    for (uint64_t mask = 0; mask < subsets; ++mask) {
        pts.clear();
        pts.push_back(0);
        for (size_t b = 0; b < interior; ++b)
            if (mask & (1ULL << b)) pts.push_back(b + 1);
        pts.push_back(npts - 1);
        double sum = 0.0;
        for (size_t k = 0; k + 1 < pts.size(); ++k) {
            const double d2 = incr2(pts[k], pts[k + 1]);
            sum += d2 > 0.0 ? std::pow(d2, 0.5 * p) : 0.0;
        }
        if (sum > best) {
            best = sum;
            best_mask = mask;
        }
    }
    res.value = std::pow(best, 1.0 / p);
    res.partition.push_back(0);
    for (size_t b = 0; b < interior; ++b)
        if (best_mask & (1ULL << b)) res.partition.push_back(b + 1);
    res.partition.push_back(npts - 1);
    return res;
}

double bbox_diam2(const std::vector<double>& values, int d) {
    const size_t npts = values.size() / d;
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (size_t k = 0; k < npts; ++k)
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], values[k * d + i]);
            hi[i] = std::max(hi[i], values[k * d + i]);
        }
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return s;
}

void check_pvar_args(const std::vector<double>& values, int d, double p) {
    if (d <= 0) throw std::invalid_argument("pvar: dimension must be positive");
    if (values.empty() || values.size() % static_cast<size_t>(d) != 0)
        throw std::invalid_argument("pvar: value buffer size must be a positive multiple of d");
    if (!(p >= 1.0))
        throw std::invalid_argument("pvar: p must be >= 1 (the partition supremum need not sit on vertices otherwise)");
}

// Squared Frobenius norm of the Chen increment between grid indices i < j.
struct AreaIncr2 {
    const Level2Lift* lift;
    double operator()(size_t i, size_t j) const {
        const int d = lift->d;
        const size_t dd = static_cast<size_t>(d) * d;
        const double* ai = lift->area.data() + i * dd;
        const double* aj = lift->area.data() + j * dd;
        const double* xi = lift->values.data() + i * d;
        const double* xj = lift->values.data() + j * d;
        const double* x0 = lift->values.data();
        double s = 0.0;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const double v = aj[static_cast<size_t>(r) * d + c] - ai[static_cast<size_t>(r) * d + c] -
                                 (xi[r] - x0[r]) * (xj[c] - xi[c]);
                s += v * v;
            }
        return s;
    }
};

double area_diam2(const Level2Lift& lift) {
    // |X_{s,t}| <= 2 max|X_{0,.}| + max|X_{0,.}| * diam(X); coarse but valid.
    const int d = lift.d;
    const size_t dd = static_cast<size_t>(d) * d;
    const size_t m = lift.npoints();
    double amax = 0.0;
    for (size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (size_t i = 0; i < dd; ++i) {
            const double x = lift.area[k * dd + i];
            s += x * x;
        }
        amax = std::max(amax, s);
    }
    amax = std::sqrt(amax);
    double xmax = 0.0;
    for (size_t k = 0; k < m; ++k) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double x = lift.values[k * d + i] - lift.values[i];
            s += x * x;
        }
        xmax = std::max(xmax, s);
    }
    xmax = std::sqrt(xmax);
    const double diam = std::sqrt(bbox_diam2(lift.values, d));
    const double bound = 2.0 * amax + xmax * diam;
    return bound * bound;
}

}  // namespace

PvarResult pvar_grid_dp(const std::vector<double>& values, int d, double p) {
    check_pvar_args(values, d, p);
    const size_t npts = values.size() / d;
    auto incr2 = [&](size_t i, size_t j) { return dist2(values.data() + i * d, values.data() + j * d, d); };
    return dp_generic(npts, p, incr2, bbox_diam2(values, d));
}

PvarResult pvar_bruteforce(const std::vector<double>& values, int d, double p) {
    check_pvar_args(values, d, p);
    const size_t npts = values.size() / d;
    auto incr2 = [&](size_t i, size_t j) { return dist2(values.data() + i * d, values.data() + j * d, d); };
    return brute_generic(npts, p, incr2, PvarMethod::BruteForce);
}

PvarResult pvar_area(const Level2Lift& lift, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("pvar_area: q must be >= 1");
    if (lift.npoints() == 0) throw std::invalid_argument("pvar_area: empty lift");
    return dp_generic(lift.npoints(), q, AreaIncr2{&lift}, area_diam2(lift));
}

PvarResult pvar_area_bruteforce(const Level2Lift& lift, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("pvar_area: q must be >= 1");
    return brute_generic(lift.npoints(), q, AreaIncr2{&lift}, PvarMethod::BruteForce);
}

double rough_norm(const Level2Lift& lift, double p) {
    if (!(p >= 2.0)) throw std::invalid_argument("rough_norm: p must be >= 2");
    double x0 = 0.0;
    for (int i = 0; i < lift.d; ++i) x0 += lift.values[i] * lift.values[i];
    const double level1 = pvar_grid_dp(lift.values, lift.d, p).value;
    const double level2 = pvar_area(lift, 0.5 * p).value;
    return std::sqrt(x0) + level1 + std::sqrt(level2);
}

ControlEvaluation control_check(size_t npoints, const std::function<double(size_t, size_t)>& c,
                                size_t max_triples, uint64_t seed) {
    if (npoints < 3) throw std::invalid_argument("control_check: need a grid with >= 3 points");
    ControlEvaluation ev;
    ev.max_defect = -std::numeric_limits<double>::infinity();
    const size_t total = npoints * (npoints - 1) * (npoints - 2) / 6;
    auto eval = [&](size_t r, size_t s, size_t t) {
        const double defect = c(r, s) + c(s, t) - c(r, t);
        ev.defects.push_back({r, s, t, defect});
        ev.max_defect = std::max(ev.max_defect, defect);
    };
    if (total <= max_triples) {
        for (size_t r = 0; r + 2 < npoints; ++r)
            for (size_t s = r + 1; s + 1 < npoints; ++s)
                for (size_t t = s + 1; t < npoints; ++t) eval(r, s, t);
    } else {
        Rng rng(seed);
        for (size_t k = 0; k < max_triples; ++k) {
            size_t a = rng.u64() % npoints, b = rng.u64() % npoints, d = rng.u64() % npoints;
            size_t r = std::min({a, b, d}), t = std::max({a, b, d});
            size_t s = a + b + d - r - t;
            if (r < s && s < t) eval(r, s, t);
        }
    }
    return ev;
}

namespace {

JumpPath skeleton_from_vertices(const std::vector<double>& times, const std::vector<double>& vals,
                                int d, double horizon, int level) {
    const double thr = std::ldexp(1.0, -level);
    JumpPath out;
    out.d = d;
    out.horizon = horizon;
    out.start = Vec(vals.begin(), vals.begin() + d);
    size_t anchor = 0;
    const size_t npts = times.size();
    for (size_t k = 1; k < npts; ++k) {
        if (std::sqrt(dist2(vals.data() + anchor * d, vals.data() + k * d, d)) >= thr) {
            out.times.push_back(times[k]);
            for (int i = 0; i < d; ++i)
                out.increments.push_back(vals[k * d + i] - vals[anchor * d + i]);
            anchor = k;
        }
    }
    return out;
}

}  // namespace

JumpPath dyadic_skeleton(const JumpPath& path, int level) {
    path.validate();
    std::vector<double> times;
    times.reserve(path.njumps() + 1);
    times.push_back(0.0);
    for (double t : path.times) times.push_back(t);
    return skeleton_from_vertices(times, event_values(path), path.d, path.horizon, level);
}

JumpPath dyadic_skeleton(const SampledPath& path, int level) {
    path.validate();
    return skeleton_from_vertices(path.times, path.values, path.d, path.horizon(), level);
}

double lepingle_ratio(const JumpPath& martingale, double p) {
    martingale.validate();
    if (!(p > 2.0)) throw std::invalid_argument("lepingle_ratio: p must be > 2");
    const int d = martingale.d;
    double qv = 0.0;
    for (size_t k = 0; k < martingale.njumps(); ++k) {
        const double* dx = martingale.increment_ptr(k);
        for (int i = 0; i < d; ++i) qv += dx[i] * dx[i];
    }
    if (qv == 0.0) throw std::invalid_argument("lepingle_ratio: quadratic variation is zero");
    const double norm = pvar_grid_dp(event_values(martingale), d, p).value;
    return norm * norm / qv;
}

}  // namespace roughwalk
