#include "roughwalk/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughwalk {

void SampledPath::validate() const {
    if (d <= 0) throw std::invalid_argument("SampledPath: dimension must be positive");
    if (times.empty()) throw std::invalid_argument("SampledPath: empty grid");
    if (times.front() != 0.0) throw std::invalid_argument("SampledPath: grid must start at 0");
    if (values.size() != times.size() * static_cast<size_t>(d))
        throw std::invalid_argument("SampledPath: value/time length mismatch");
    for (size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("SampledPath: times must be strictly increasing");
}

Vec SampledPath::eval(double t) const {
    if (t <= times.front()) return value(0);
    if (t >= times.back()) return value(npoints() - 1);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const size_t k = static_cast<size_t>(it - times.begin());  // times[k-1] <= t < times[k]
    if (interp == Interp::GridSamples) return value(k - 1);
    const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    Vec out(d);
    for (int i = 0; i < d; ++i)
        out[i] = (1.0 - w) * values[(k - 1) * d + i] + w * values[k * d + i];
    return out;
}

void JumpPath::validate() const {
    if (d <= 0) throw std::invalid_argument("JumpPath: dimension must be positive");
    if (static_cast<int>(start.size()) != d)
        throw std::invalid_argument("JumpPath: start value has wrong dimension");
    if (!(horizon > 0.0)) throw std::invalid_argument("JumpPath: horizon must be positive");
    if (increments.size() != times.size() * static_cast<size_t>(d))
        throw std::invalid_argument("JumpPath: increment/time length mismatch");
    double prev = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > prev))
            throw std::invalid_argument("JumpPath: jump times must be strictly increasing in (0, T]");
        prev = times[k];
    }
    if (!times.empty() && times.back() > horizon)
        throw std::invalid_argument("JumpPath: jump time beyond horizon");
}

Vec JumpPath::value_at(double t) const {
    Vec v = start;
    for (size_t k = 0; k < times.size() && times[k] <= t; ++k)
        for (int i = 0; i < d; ++i) v[i] += increments[k * d + i];
    return v;
}

std::vector<double> event_values(const JumpPath& path) {
    const int d = path.d;
    std::vector<double> vals((path.njumps() + 1) * d);
    for (int i = 0; i < d; ++i) vals[i] = path.start[i];
    for (size_t k = 0; k < path.njumps(); ++k)
        for (int i = 0; i < d; ++i) vals[(k + 1) * d + i] = vals[k * d + i] + path.increments[k * d + i];
    return vals;
}

SampledPath interpolate(const JumpPath& path) {
    path.validate();
    SampledPath out;
    out.d = path.d;
    out.interp = Interp::PiecewiseLinear;
    const std::vector<double> vals = event_values(path);
    out.times.reserve(path.njumps() + 2);
    out.times.push_back(0.0);
    for (double t : path.times) out.times.push_back(t);
    out.values = vals;
    if (path.times.empty() || path.times.back() < path.horizon) {
        out.times.push_back(path.horizon);
        out.values.insert(out.values.end(), vals.end() - path.d, vals.end());
    }
    return out;
}

JumpPath diffusive_rescale(const JumpPath& path, double n, double target_horizon) {
    if (!(n > 0.0)) throw std::invalid_argument("diffusive_rescale: n must be positive");
    if (target_horizon > 0.0 && path.horizon < n * target_horizon * (1.0 - 1e-12))
        throw std::invalid_argument("diffusive_rescale: path horizon too short for target");
    JumpPath out = path;
    const double s = 1.0 / std::sqrt(n);
    for (double& t : out.times) t /= n;
    for (double& x : out.increments) x *= s;
    for (double& x : out.start) x *= s;
    out.horizon = path.horizon / n;
    return out;
}

SampledPath diffusive_rescale(const SampledPath& path, double n, double target_horizon) {
    if (!(n > 0.0)) throw std::invalid_argument("diffusive_rescale: n must be positive");
    if (target_horizon > 0.0 && path.horizon() < n * target_horizon * (1.0 - 1e-12))
        throw std::invalid_argument("diffusive_rescale: path horizon too short for target");
    SampledPath out = path;
    const double s = 1.0 / std::sqrt(n);
    for (double& t : out.times) t /= n;
    for (double& x : out.values) x *= s;
    return out;
}

}  // namespace roughwalk
