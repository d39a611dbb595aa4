#include "roughwalk/lift.hpp"

#include <algorithm>
#include <stdexcept>

namespace roughwalk {

namespace {

// Compensated accumulator over a flat block of doubles. The left-point sums
// run over 1e5..1e6 events per path and the 1e-12 Chen/gap invariants need the
// extra digits.
struct KahanBlock {
    std::vector<double> sum, comp;
    explicit KahanBlock(size_t n) : sum(n, 0.0), comp(n, 0.0) {}
    void add(size_t i, double x) {
        const double y = x - comp[i];
        const double t = sum[i] + y;
        comp[i] = (t - sum[i]) - y;
        sum[i] = t;
    }
};

}  // namespace

size_t Level2Lift::index_of(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t)
        throw std::invalid_argument("Level2Lift: time is not on the lift grid");
    return static_cast<size_t>(it - times.begin());
}

Level2Lift ito_lift_jump(const JumpPath& path) {
    path.validate();
    const int d = path.d;
    const size_t dd = static_cast<size_t>(d) * d;
    const size_t nj = path.njumps();
    const bool pad_end = path.times.empty() || path.times.back() < path.horizon;

    Level2Lift lift;
    lift.d = d;
    lift.kind = LiftKind::Ito;
    lift.times.reserve(nj + 1 + (pad_end ? 1 : 0));
    lift.times.push_back(0.0);
    for (double t : path.times) lift.times.push_back(t);
    if (pad_end) lift.times.push_back(path.horizon);

    const size_t m = lift.times.size();
    lift.values.assign(m * d, 0.0);
    lift.area.assign(m * dd, 0.0);

    Vec x = path.start;  // current cadlag value
    for (int i = 0; i < d; ++i) lift.values[i] = x[i];
    KahanBlock acc(dd);
    for (size_t k = 0; k < nj; ++k) {
        const double* dx = path.increment_ptr(k);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                acc.add(static_cast<size_t>(i) * d + j, (x[i] - path.start[i]) * dx[j]);
        for (int i = 0; i < d; ++i) x[i] += dx[i];
        const size_t row = k + 1;
        for (int i = 0; i < d; ++i) lift.values[row * d + i] = x[i];
        for (size_t i = 0; i < dd; ++i) lift.area[row * dd + i] = acc.sum[i];
    }
    if (pad_end) {
        const size_t row = m - 1;
        for (int i = 0; i < d; ++i) lift.values[row * d + i] = x[i];
        for (size_t i = 0; i < dd; ++i) lift.area[row * dd + i] = acc.sum[i];
    }
    return lift;
}

Level2Lift strato_lift_linear(const SampledPath& path) {
    path.validate();
    if (path.interp != Interp::PiecewiseLinear)
        throw std::invalid_argument("strato_lift_linear: path must use the piecewise-linear interpretation");
    const int d = path.d;
    const size_t dd = static_cast<size_t>(d) * d;
    const size_t m = path.npoints();

    Level2Lift lift;
    lift.d = d;
    lift.kind = LiftKind::StratoLinear;
    lift.times = path.times;
    lift.values = path.values;
    lift.area.assign(m * dd, 0.0);

    const double* x0 = path.value_ptr(0);
    KahanBlock acc(dd);
    for (size_t k = 0; k + 1 < m; ++k) {
        const double* a = path.value_ptr(k);
        const double* b = path.value_ptr(k + 1);
        for (int i = 0; i < d; ++i) {
            const double mid = 0.5 * (a[i] + b[i]) - x0[i];
            for (int j = 0; j < d; ++j)
                acc.add(static_cast<size_t>(i) * d + j, mid * (b[j] - a[j]));
        }
        for (size_t i = 0; i < dd; ++i) lift.area[(k + 1) * dd + i] = acc.sum[i];
    }
    return lift;
}

Level2Lift ito_lift_sampled(const SampledPath& path) {
    path.validate();
    const int d = path.d;
    const size_t dd = static_cast<size_t>(d) * d;
    const size_t m = path.npoints();

    Level2Lift lift;
    lift.d = d;
    lift.kind = LiftKind::Ito;
    lift.times = path.times;
    lift.values = path.values;
    lift.area.assign(m * dd, 0.0);

    const double* x0 = path.value_ptr(0);
    KahanBlock acc(dd);
    for (size_t k = 0; k + 1 < m; ++k) {
        const double* a = path.value_ptr(k);
        const double* b = path.value_ptr(k + 1);
        for (int i = 0; i < d; ++i) {
            const double left = a[i] - x0[i];
            for (int j = 0; j < d; ++j)
                acc.add(static_cast<size_t>(i) * d + j, left * (b[j] - a[j]));
        }
        for (size_t i = 0; i < dd; ++i) lift.area[(k + 1) * dd + i] = acc.sum[i];
    }
    return lift;
}

GapSeries interpolation_gap(const JumpPath& path) {
    path.validate();
    const int d = path.d;
    const size_t dd = static_cast<size_t>(d) * d;
    const size_t nj = path.njumps();

    GapSeries g;
    g.d = d;
    g.times = path.times;
    g.gap.assign(nj * dd, 0.0);
    KahanBlock acc(dd);
    for (size_t k = 0; k < nj; ++k) {
        const double* dx = path.increment_ptr(k);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                acc.add(static_cast<size_t>(i) * d + j, 0.5 * dx[i] * dx[j]);
        for (size_t i = 0; i < dd; ++i) g.gap[k * dd + i] = acc.sum[i];
    }
    return g;
}

Mat chen_reconstruct_idx(const Level2Lift& lift, size_t is, size_t it) {
    if (is > it) throw std::invalid_argument("chen_reconstruct: need s <= t");
    const int d = lift.d;
    const size_t dd = static_cast<size_t>(d) * d;
    Mat m(d);
    const double* as = lift.area.data() + is * dd;
    const double* at = lift.area.data() + it * dd;
    const double* xs = lift.values.data() + is * d;
    const double* xt = lift.values.data() + it * d;
    const double* x0 = lift.values.data();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = at[static_cast<size_t>(i) * d + j] - as[static_cast<size_t>(i) * d + j] -
                      (xs[i] - x0[i]) * (xt[j] - xs[j]);
    return m;
}

Mat chen_reconstruct(const Level2Lift& lift, double s, double t) {
    if (s > t) throw std::invalid_argument("chen_reconstruct: need s <= t");
    return chen_reconstruct_idx(lift, lift.index_of(s), lift.index_of(t));
}

Mat chen_defect(const Level2Lift& lift, size_t ir, size_t is, size_t it) {
    if (!(ir <= is && is <= it)) throw std::invalid_argument("chen_defect: need r <= s <= t");
    Mat rt = chen_reconstruct_idx(lift, ir, it);
    Mat rs = chen_reconstruct_idx(lift, ir, is);
    Mat st = chen_reconstruct_idx(lift, is, it);
    const int d = lift.d;
    const double* xr = lift.values.data() + ir * d;
    const double* xs = lift.values.data() + is * d;
    const double* xt = lift.values.data() + it * d;
    Mat out(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out(i, j) = rt(i, j) - rs(i, j) - st(i, j) - (xs[i] - xr[i]) * (xt[j] - xs[j]);
    return out;
}

}  // namespace roughwalk
