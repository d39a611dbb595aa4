#include "roughwalk/models.hpp"

#include <cmath>
#include <stdexcept>

namespace roughwalk {

// ---------- conductance law ----------

double ConductanceLaw::mean() const {
    switch (type) {
        case Type::Constant: return a;
        case Type::Uniform: return 0.5 * (a + b);
        case Type::TwoPoint: return q * a + (1.0 - q) * b;
    }
    return a;
}

double ConductanceLaw::lo() const { return type == Type::Constant ? a : std::min(a, b); }
double ConductanceLaw::hi() const { return type == Type::Constant ? a : std::max(a, b); }

double ConductanceLaw::from_u01(double u) const {
    switch (type) {
        case Type::Constant: return a;
        case Type::Uniform: return a + (b - a) * u;
        case Type::TwoPoint: return u < q ? a : b;
    }
    return a;
}

void ConductanceLaw::validate() const {
    if (!(lo() > 0.0)) throw std::invalid_argument("ConductanceLaw: support must be strictly positive");
    if (type == Type::Uniform && !(b >= a))
        throw std::invalid_argument("ConductanceLaw: uniform law needs a <= b");
    if (type == Type::TwoPoint && !(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("ConductanceLaw: two-point weight must lie in [0,1]");
}

// ---------- environment ----------

ConductanceEnvironment::ConductanceEnvironment(int dim, ConductanceLaw law, uint64_t seed)
    : d_(dim), law_(law), seed_(seed) {
    if (dim <= 0 || dim > 3) throw std::invalid_argument("ConductanceEnvironment: dimension must be 1..3");
    law.validate();
}

double ConductanceEnvironment::draw(const BondKey& key) const {
    uint64_t h = seed_;
    for (int i = 0; i < d_; ++i) h = mix64(h, static_cast<uint64_t>(key.site[i]));
    h = mix64(h, static_cast<uint64_t>(key.axis));
    return law_.from_u01(u01_from_bits(h));
}

double ConductanceEnvironment::weight(const int64_t* site, int axis) const {
    BondKey key;
    for (int i = 0; i < d_; ++i) key.site[i] = site[i];
    key.axis = axis;
    if (quenched_) {
        const auto it = frozen_.find(key);
        if (it == frozen_.end())
            throw std::runtime_error("ConductanceEnvironment: bond outside the frozen box");
        return it->second;
    }
    return draw(key);
}

void ConductanceEnvironment::freeze_box(const std::vector<int64_t>& lo, const std::vector<int64_t>& hi) {
    if (static_cast<int>(lo.size()) != d_ || static_cast<int>(hi.size()) != d_)
        throw std::invalid_argument("freeze_box: bounds must have the environment dimension");
    frozen_.clear();
    std::vector<int64_t> site(lo.begin(), lo.end());
    while (true) {
        BondKey key;
        for (int i = 0; i < d_; ++i) key.site[i] = site[i];
        for (int axis = 0; axis < d_; ++axis) {
            key.axis = axis;
            frozen_[key] = draw(key);
        }
        int i = 0;
        for (; i < d_; ++i) {
            if (++site[i] <= hi[i]) break;
            site[i] = lo[i];
        }
        if (i == d_) break;
    }
    quenched_ = true;
}

JumpPath simulate_conductance_walk(const ConductanceEnvironment& env, double horizon, Rng& rng) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_conductance_walk: horizon must be positive");
    const int d = env.dim();
    JumpPath path;
    path.d = d;
    path.horizon = horizon;
    path.start.assign(d, 0.0);

    std::vector<int64_t> site(d, 0);
    std::vector<int64_t> nbr(d, 0);
    std::vector<double> rates(2 * d, 0.0);
    double t = 0.0;
    // expected jump count, for reservation
    path.times.reserve(static_cast<size_t>(2.0 * d * env.law().mean() * horizon * 1.1) + 16);
    path.increments.reserve(path.times.capacity() * d);

    while (true) {
        double total = 0.0;
        for (int axis = 0; axis < d; ++axis) {
            rates[2 * axis] = env.weight(site.data(), axis);  // bond {x, x + e_axis}
            for (int i = 0; i < d; ++i) nbr[i] = site[i];
            nbr[axis] -= 1;
            rates[2 * axis + 1] = env.weight(nbr.data(), axis);  // bond {x - e_axis, x}
            total += rates[2 * axis] + rates[2 * axis + 1];
        }
        t += rng.exponential(total);
        if (t > horizon) break;
        double u = rng.u01() * total;
        int pick = 0;
        for (; pick < 2 * d - 1; ++pick) {
            u -= rates[pick];
            if (u <= 0.0) break;
        }
        const int axis = pick / 2;
        const int dir = (pick % 2 == 0) ? 1 : -1;
        site[axis] += dir;
        path.times.push_back(t);
        for (int i = 0; i < d; ++i)
            path.increments.push_back(i == axis ? static_cast<double>(dir) : 0.0);
    }
    return path;
}

// ---------- Ornstein-Uhlenbeck ----------

SampledPath simulate_ou(double micro_horizon, double step, Rng& rng) {
    if (!(step > 0.0)) throw std::invalid_argument("simulate_ou: step must be positive");
    if (!(micro_horizon > 0.0)) throw std::invalid_argument("simulate_ou: horizon must be positive");

    SampledPath path;
    path.d = 2;
    path.interp = Interp::GridSamples;
    const size_t nfull = static_cast<size_t>(micro_horizon / step);
    path.times.reserve(nfull + 2);
    path.values.reserve(2 * (nfull + 2));

    double x0 = rng.normal(), x1 = rng.normal();
    path.times.push_back(0.0);
    path.values.push_back(x0);
    path.values.push_back(x1);

    const double ch = std::cos(step), sh = std::sin(step);
    const double decay = std::exp(-step);
    const double sd = std::sqrt(1.0 - std::exp(-2.0 * step));
    double t = 0.0;
    while (t < micro_horizon * (1.0 - 1e-15)) {
        double tau = step, c = ch, s = sh, dec = decay, sig = sd;
        if (t + step > micro_horizon) {  // final partial step, same exact transition
            tau = micro_horizon - t;
            c = std::cos(tau);
            s = std::sin(tau);
            dec = std::exp(-tau);
            sig = std::sqrt(1.0 - std::exp(-2.0 * tau));
        }
        // x <- e^{-tau} R(-tau) x + noise
        const double y0 = dec * (c * x0 + s * x1);
        const double y1 = dec * (-s * x0 + c * x1);
        x0 = y0 + sig * rng.normal();
        x1 = y1 + sig * rng.normal();
        t = (t + tau >= micro_horizon * (1.0 - 1e-15)) ? micro_horizon : t + tau;
        path.times.push_back(t);
        path.values.push_back(x0);
        path.values.push_back(x1);
    }
    return path;
}

SampledPath additive_functional(const SampledPath& micro, double n, const Observable& f, int out_dim) {
    micro.validate();
    if (!(n > 0.0)) throw std::invalid_argument("additive_functional: scale must be positive");
    if (out_dim <= 0) throw std::invalid_argument("additive_functional: observable dimension must be positive");

    SampledPath z;
    z.d = out_dim;
    z.interp = Interp::PiecewiseLinear;
    const size_t m = micro.npoints();
    z.times.resize(m);
    z.values.assign(m * out_dim, 0.0);

    const double scale = 1.0 / std::sqrt(n);
    std::vector<double> fa(out_dim), fb(out_dim);
    std::vector<double> acc(out_dim, 0.0), comp(out_dim, 0.0);
    f(micro.value_ptr(0), fa.data());
    z.times[0] = 0.0;
    for (size_t k = 1; k < m; ++k) {
        f(micro.value_ptr(k), fb.data());
        const double dt = micro.times[k] - micro.times[k - 1];
        for (int i = 0; i < out_dim; ++i) {
            const double y = 0.5 * (fa[i] + fb[i]) * dt - comp[i];
            const double t = acc[i] + y;
            comp[i] = (t - acc[i]) - y;
            acc[i] = t;
            z.values[k * out_dim + i] = scale * acc[i];
        }
        z.times[k] = micro.times[k] / n;
        std::swap(fa, fb);
    }
    return z;
}

// ---------- periodic coefficients ----------

void PeriodicCoefficients::validate() const {
    if (d <= 0 || d > 3) throw std::invalid_argument("PeriodicCoefficients: dimension must be 1..3");
    const size_t dd = static_cast<size_t>(d) * d;
    for (const auto& mode : modes) {
        if (static_cast<int>(mode.k.size()) != d || mode.m.size() != dd)
            throw std::invalid_argument("PeriodicCoefficients: malformed mode entry");
    }
    // Hermitian symmetry: the -k coefficient must be the conjugate
    for (const auto& mode : modes) {
        bool found = false;
        for (const auto& other : modes) {
            bool neg = true;
            for (int i = 0; i < d; ++i) neg = neg && (other.k[i] == -mode.k[i]);
            if (!neg) continue;
            found = true;
            for (size_t i = 0; i < dd; ++i)
                if (std::abs(other.m[i] - std::conj(mode.m[i])) > 1e-12)
                    throw std::invalid_argument("PeriodicCoefficients: coefficients are not Hermitian in k");
        }
        if (!found) throw std::invalid_argument("PeriodicCoefficients: missing -k partner mode");
    }
}

int PeriodicCoefficients::max_freq() const {
    int m = 0;
    for (const auto& mode : modes)
        for (int ki : mode.k) m = std::max(m, std::abs(ki));
    return m;
}

Mat PeriodicCoefficients::a_at(const double* x) const {
    Mat out(d);
    for (const auto& mode : modes) {
        double phase = 0.0;
        for (int i = 0; i < d; ++i) phase += mode.k[i] * x[i];
        const std::complex<double> e(std::cos(2.0 * M_PI * phase), std::sin(2.0 * M_PI * phase));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out(i, j) += (mode.m[static_cast<size_t>(i) * d + j] * e).real();
    }
    return out;
}

Mat PeriodicCoefficients::aS_at(const double* x) const { return a_at(x).sym(); }
Mat PeriodicCoefficients::aA_at(const double* x) const { return a_at(x).antisym(); }

Vec PeriodicCoefficients::b_at(const double* x) const {
    Vec out(d, 0.0);
    for (const auto& mode : modes) {
        double phase = 0.0;
        for (int i = 0; i < d; ++i) phase += mode.k[i] * x[i];
        const std::complex<double> e(std::cos(2.0 * M_PI * phase), std::sin(2.0 * M_PI * phase));
        const std::complex<double> der = std::complex<double>(0.0, 2.0 * M_PI) * e;
        for (int j = 0; j < d; ++j) {
            std::complex<double> s = 0.0;
            for (int i = 0; i < d; ++i)
                s += static_cast<double>(mode.k[i]) * mode.m[static_cast<size_t>(i) * d + j];
            out[j] += (s * der).real();
        }
    }
    return out;
}

double PeriodicCoefficients::max_drift_bound() const {
    double bound = 0.0;
    for (const auto& mode : modes) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            std::complex<double> c = 0.0;
            for (int i = 0; i < d; ++i)
                c += static_cast<double>(mode.k[i]) * mode.m[static_cast<size_t>(i) * d + j];
            s += std::abs(c) * 2.0 * M_PI;
        }
        bound += s;
    }
    return bound;
}

bool PeriodicCoefficients::aS_is_constant(double tol) const {
    const size_t dd = static_cast<size_t>(d) * d;
    for (const auto& mode : modes) {
        bool zero_mode = true;
        for (int ki : mode.k) zero_mode = zero_mode && ki == 0;
        if (zero_mode) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const auto sym = 0.5 * (mode.m[static_cast<size_t>(i) * d + j] +
                                        mode.m[static_cast<size_t>(j) * d + i]);
                if (std::abs(sym) > tol) return false;
            }
    }
    (void)dd;
    return true;
}

std::pair<double, double> PeriodicCoefficients::ellipticity_bounds(int samples_per_dim) const {
    double lo = 1e300, hi = -1e300;
    std::vector<double> x(d, 0.0);
    std::vector<int> idx(d, 0);
    while (true) {
        for (int i = 0; i < d; ++i) x[i] = static_cast<double>(idx[i]) / samples_per_dim;
        Vec w;
        Mat v;
        jacobi_eigen(aS_at(x.data()), w, v);
        for (double ev : w) {
            lo = std::min(lo, ev);
            hi = std::max(hi, ev);
        }
        int i = 0;
        for (; i < d; ++i) {
            if (++idx[i] < samples_per_dim) break;
            idx[i] = 0;
        }
        if (i == d) break;
    }
    return {lo, hi};
}

PeriodicCoefficients PeriodicCoefficients::identity(int dim) {
    PeriodicCoefficients c;
    c.d = dim;
    FourierMode zero;
    zero.k.assign(dim, 0);
    zero.m.assign(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) zero.m[static_cast<size_t>(i) * dim + i] = 1.0;
    c.modes.push_back(std::move(zero));
    return c;
}

PeriodicCoefficients PeriodicCoefficients::antisym_sin2(double kappa) {
    // sin(2 pi x1) sin(2 pi x2) has coefficients -1/4 at (1,1), (-1,-1) and
    // +1/4 at (1,-1), (-1,1).
    PeriodicCoefficients c = identity(2);
    auto add = [&](int k1, int k2, double coeff) {
        FourierMode m;
        m.k = {k1, k2};
        m.m.assign(4, 0.0);
        m.m[1] = kappa * coeff;   // (0,1) entry:  s
        m.m[2] = -kappa * coeff;  // (1,0) entry: -s
        c.modes.push_back(std::move(m));
    };
    add(1, 1, -0.25);
    add(-1, -1, -0.25);
    add(1, -1, 0.25);
    add(-1, 1, 0.25);
    return c;
}

PeriodicCoefficients PeriodicCoefficients::d1_cosine(double a0, double a1) {
    PeriodicCoefficients c;
    c.d = 1;
    FourierMode zero;
    zero.k = {0};
    zero.m = {a0};
    c.modes.push_back(zero);
    FourierMode plus;
    plus.k = {1};
    plus.m = {0.5 * a1};
    c.modes.push_back(plus);
    FourierMode minus;
    minus.k = {-1};
    minus.m = {0.5 * a1};
    c.modes.push_back(minus);
    return c;
}

// ---------- periodic diffusion ----------

namespace {

struct SigmaEvaluator {
    const PeriodicCoefficients* coeffs;
    bool constant;
    bool cache = false;
    Mat fixed;
    int res = 0;
    std::vector<char> have;
    std::vector<double> store;  // res^d entries of d*d

    explicit SigmaEvaluator(const PeriodicCoefficients& c, const PeriodicSimOptions& opts)
        : coeffs(&c), constant(c.aS_is_constant()) {
        if (constant) {
            std::vector<double> zero(c.d, 0.0);
            fixed = sqrt_of(c.aS_at(zero.data()));
        } else if (opts.cache_sigma) {
            cache = true;
            res = opts.cache_resolution;
            size_t cells = 1;
            for (int i = 0; i < c.d; ++i) cells *= static_cast<size_t>(res);
            have.assign(cells, 0);
            store.assign(cells * c.d * c.d, 0.0);
        }
    }

    static Mat sqrt_of(const Mat& aS) {
        if (min_eigenvalue_sym(aS) <= 0.0)
            throw std::runtime_error("periodic diffusion: a^S not positive definite (violated ellipticity)");
        return sqrt_sym_psd(aS);
    }

    Mat at(const double* x) {
        if (constant) return fixed;
        if (cache) {
            const int d = coeffs->d;
            size_t cell = 0;
            for (int i = 0; i < d; ++i) {
                double frac = x[i] - std::floor(x[i]);
                int gi = static_cast<int>(frac * res);
                if (gi >= res) gi = res - 1;
                cell = cell * static_cast<size_t>(res) + static_cast<size_t>(gi);
            }
            const size_t dd = static_cast<size_t>(d) * d;
            if (!have[cell]) {
                std::vector<double> center(d);
                size_t c = cell;
                for (int i = d - 1; i >= 0; --i) {
                    center[i] = (static_cast<double>(c % res) + 0.5) / res;
                    c /= res;
                }
                const Mat s = sqrt_of(coeffs->aS_at(center.data()));
                for (size_t i = 0; i < dd; ++i) store[cell * dd + i] = s.a[i];
                have[cell] = 1;
            }
            Mat out(d);
            const size_t dd2 = static_cast<size_t>(d) * d;
            for (size_t i = 0; i < dd2; ++i) out.a[i] = store[cell * dd2 + i];
            return out;
        }
        return sqrt_of(coeffs->aS_at(x));
    }
};

}  // namespace

SampledPath simulate_periodic_diffusion(const PeriodicCoefficients& coeffs, double micro_horizon,
                                        double step, Rng& rng, const PeriodicSimOptions& opts) {
    coeffs.validate();
    if (!(step > 0.0)) throw std::invalid_argument("simulate_periodic_diffusion: step must be positive");
    if (!(micro_horizon > 0.0))
        throw std::invalid_argument("simulate_periodic_diffusion: horizon must be positive");

    const int d = coeffs.d;
    SigmaEvaluator sigma(coeffs, opts);

    SampledPath path;
    path.d = d;
    path.interp = Interp::GridSamples;
    const size_t nfull = static_cast<size_t>(micro_horizon / step);
    path.times.reserve(nfull + 2);
    path.values.reserve((nfull + 2) * d);

    std::vector<double> x(d);
    for (int i = 0; i < d; ++i) x[i] = rng.u01() - 0.5;
    path.times.push_back(0.0);
    for (int i = 0; i < d; ++i) path.values.push_back(x[i]);

    std::vector<double> xi(d);
    double t = 0.0;
    while (t < micro_horizon * (1.0 - 1e-15)) {
        double h = step;
        if (t + step > micro_horizon) h = micro_horizon - t;
        const Vec b = coeffs.b_at(x.data());
        const Mat s = sigma.at(x.data());
        for (int i = 0; i < d; ++i) xi[i] = rng.normal();
        const double noise_scale = std::sqrt(2.0 * h);
        for (int i = 0; i < d; ++i) {
            double dx = b[i] * h;
            for (int j = 0; j < d; ++j) dx += noise_scale * s(i, j) * xi[j];
            x[i] += dx;
        }
        t = (t + h >= micro_horizon * (1.0 - 1e-15)) ? micro_horizon : t + h;
        path.times.push_back(t);
        for (int i = 0; i < d; ++i) path.values.push_back(x[i]);
    }
    return path;
}

}  // namespace roughwalk
