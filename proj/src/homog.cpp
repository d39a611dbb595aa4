#include "roughwalk/homog.hpp"

#include <cmath>
#include <stdexcept>

namespace roughwalk {

namespace {

using cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Dense frequency box [-K, K]^d, row-major over shifted indices.
struct FreqBox {
    int d, K, side;
    explicit FreqBox(int dim, int cutoff) : d(dim), K(cutoff), side(2 * cutoff + 1) {}
    size_t size() const {
        size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<size_t>(side);
        return s;
    }
    size_t index(const int* k) const {
        size_t idx = 0;
        for (int i = 0; i < d; ++i) idx = idx * static_cast<size_t>(side) + static_cast<size_t>(k[i] + K);
        return idx;
    }
    void decode(size_t idx, int* k) const {
        for (int i = d - 1; i >= 0; --i) {
            k[i] = static_cast<int>(idx % static_cast<size_t>(side)) - K;
            idx /= static_cast<size_t>(side);
        }
    }
    bool contains(const int* k) const {
        for (int i = 0; i < d; ++i)
            if (k[i] < -K || k[i] > K) return false;
        return true;
    }
};

// y(k) = (2 pi)^2 sum_m k^T a(m) (k - m) u(k - m), the Galerkin image of
// -div(a grad u) restricted to the output box (input coefficients are read
// from the input box, zero outside).
void apply_operator(const PeriodicCoefficients& coeffs, const FreqBox& in, const FreqBox& out,
                    const std::vector<cplx>& u, std::vector<cplx>& y) {
    const int d = coeffs.d;
    y.assign(out.size(), cplx(0.0, 0.0));
    std::vector<int> k(d), km(d);
    for (size_t idx = 0; idx < out.size(); ++idx) {
        out.decode(idx, k.data());
        cplx acc(0.0, 0.0);
        for (const auto& mode : coeffs.modes) {
            bool inside = true;
            for (int i = 0; i < d; ++i) {
                km[i] = k[i] - mode.k[i];
                if (km[i] < -in.K || km[i] > in.K) inside = false;
            }
            if (!inside) continue;
            const cplx uv = u[in.index(km.data())];
            if (uv == cplx(0.0, 0.0)) continue;
            cplx quad(0.0, 0.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    quad += static_cast<double>(k[i]) * mode.m[static_cast<size_t>(i) * d + j] *
                            static_cast<double>(km[j]);
            acc += quad * uv;
        }
        y[idx] = kTwoPi * kTwoPi * acc;
    }
}

// Right-hand side b_j on the box: b_j(k) = 2 pi i sum_i k_i a(k)_{ij}.
std::vector<cplx> rhs_component(const PeriodicCoefficients& coeffs, const FreqBox& box, int j) {
    const int d = coeffs.d;
    std::vector<cplx> b(box.size(), cplx(0.0, 0.0));
    for (const auto& mode : coeffs.modes) {
        if (!box.contains(mode.k.data())) continue;
        cplx s(0.0, 0.0);
        for (int i = 0; i < d; ++i)
            s += static_cast<double>(mode.k[i]) * mode.m[static_cast<size_t>(i) * d + j];
        b[box.index(mode.k.data())] += cplx(0.0, kTwoPi) * s;
    }
    return b;
}

cplx cdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s(0.0, 0.0);
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double cnorm(const std::vector<cplx>& a) { return std::sqrt(std::abs(cdot(a, a))); }

// Preconditioned BiCGStab for the (non-symmetric when a^A != 0) Galerkin
// system. The preconditioner is the diagonal symbol of the averaged
// symmetric part.
std::vector<cplx> bicgstab(const PeriodicCoefficients& coeffs, const FreqBox& box,
                           const std::vector<cplx>& rhs, const std::vector<double>& precond,
                           int maxit) {
    const size_t n = box.size();
    auto apply = [&](const std::vector<cplx>& u, std::vector<cplx>& y) {
        apply_operator(coeffs, box, box, u, y);
        // zero mode pinned: identity row
        std::vector<int> zero(static_cast<size_t>(box.d), 0);
        const size_t z = box.index(zero.data());
        y[z] = u[z];
        for (size_t i = 0; i < n; ++i) y[i] /= precond[i];
    };

    std::vector<cplx> b = rhs;
    for (size_t i = 0; i < n; ++i) b[i] /= precond[i];

    std::vector<cplx> x(n, cplx(0.0, 0.0)), r = b, rhat = b;
    std::vector<cplx> v(n, cplx(0.0, 0.0)), p(n, cplx(0.0, 0.0)), s(n), t(n);
    const double bnorm = cnorm(b);
    if (bnorm == 0.0) return x;
    const double tol = 1e-14 * bnorm;

    cplx rho(1.0, 0.0), alpha(1.0, 0.0), omega(1.0, 0.0);
    for (int it = 0; it < maxit; ++it) {
        const cplx rho_new = cdot(rhat, r);
        if (std::abs(rho_new) < 1e-300)
            throw std::runtime_error("torus_poisson_solve: singular Galerkin system");
        if (it == 0) {
            p = r;
        } else {
            const cplx beta = (rho_new / rho) * (alpha / omega);
            for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        apply(p, v);
        const cplx denom = cdot(rhat, v);
        if (std::abs(denom) < 1e-300)
            throw std::runtime_error("torus_poisson_solve: singular Galerkin system");
        alpha = rho_new / denom;
        for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (cnorm(s) < tol) {
            for (size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
            return x;
        }
        apply(s, t);
        const cplx tt = cdot(t, t);
        if (std::abs(tt) < 1e-300)
            throw std::runtime_error("torus_poisson_solve: singular Galerkin system");
        omega = cdot(t, s) / tt;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        if (cnorm(r) < tol) return x;
        rho = rho_new;
    }
    return x;  // caller certifies the residual
}

// Parseval pairing of real fields from coefficient arrays on (possibly
// different) boxes: int u . w dx = Re sum_k conj(u(k)) w(k), summed over the
// smaller box (u vanishes outside it).
double parseval_dot(const FreqBox& ubox, const std::vector<std::vector<cplx>>& u, const FreqBox& wbox,
                    const std::vector<std::vector<cplx>>& w) {
    const int d = ubox.d;
    std::vector<int> k(static_cast<size_t>(d));
    double total = 0.0;
    for (size_t idx = 0; idx < ubox.size(); ++idx) {
        ubox.decode(idx, k.data());
        if (!wbox.contains(k.data())) continue;
        const size_t widx = wbox.index(k.data());
        cplx s(0.0, 0.0);
        for (int c = 0; c < d; ++c) s += std::conj(u[c][idx]) * w[c][widx];
        total += s.real();
    }
    return total;
}

// Gradient coefficients of a scalar field, plus an optional constant unit
// vector added to the gradient (for grad phi^i + e_i).
std::vector<std::vector<cplx>> gradient_field(const FreqBox& box, const std::vector<cplx>& f,
                                              int unit_dir) {
    const int d = box.d;
    std::vector<std::vector<cplx>> g(static_cast<size_t>(d),
                                     std::vector<cplx>(box.size(), cplx(0.0, 0.0)));
    std::vector<int> k(static_cast<size_t>(d));
    for (size_t idx = 0; idx < box.size(); ++idx) {
        box.decode(idx, k.data());
        for (int l = 0; l < d; ++l) g[l][idx] = cplx(0.0, kTwoPi * k[l]) * f[idx];
    }
    if (unit_dir >= 0) {
        std::vector<int> zero(static_cast<size_t>(d), 0);
        g[unit_dir][box.index(zero.data())] += cplx(1.0, 0.0);
    }
    return g;
}

// w = M v for a matrix Fourier multiplier M (selector picks the full, the
// symmetric or the antisymmetric part of each mode); convolution onto the
// output box.
enum class Part { Full, Sym, Anti };
std::vector<std::vector<cplx>> multiply_field(const PeriodicCoefficients& coeffs, Part part,
                                              const FreqBox& in,
                                              const std::vector<std::vector<cplx>>& v,
                                              const FreqBox& out) {
    const int d = coeffs.d;
    std::vector<std::vector<cplx>> w(static_cast<size_t>(d),
                                     std::vector<cplx>(out.size(), cplx(0.0, 0.0)));
    std::vector<int> k(static_cast<size_t>(d)), km(static_cast<size_t>(d));
    for (size_t idx = 0; idx < out.size(); ++idx) {
        out.decode(idx, k.data());
        for (const auto& mode : coeffs.modes) {
            bool inside = true;
            for (int i = 0; i < d; ++i) {
                km[i] = k[i] - mode.k[i];
                if (km[i] < -in.K || km[i] > in.K) inside = false;
            }
            if (!inside) continue;
            const size_t vidx = in.index(km.data());
            for (int r = 0; r < d; ++r) {
                cplx acc(0.0, 0.0);
                for (int c = 0; c < d; ++c) {
                    cplx mrc = mode.m[static_cast<size_t>(r) * d + c];
                    if (part != Part::Full) {
                        const cplx mcr = mode.m[static_cast<size_t>(c) * d + r];
                        mrc = part == Part::Sym ? 0.5 * (mrc + mcr) : 0.5 * (mrc - mcr);
                    }
                    acc += mrc * v[c][vidx];
                }
                w[r][idx] += acc;
            }
        }
    }
    return w;
}

Mat zero_mode_sym(const PeriodicCoefficients& coeffs) {
    Mat m(coeffs.d);
    for (const auto& mode : coeffs.modes) {
        bool zero = true;
        for (int ki : mode.k) zero = zero && ki == 0;
        if (!zero) continue;
        for (int i = 0; i < coeffs.d; ++i)
            for (int j = 0; j < coeffs.d; ++j)
                m(i, j) += mode.m[static_cast<size_t>(i) * coeffs.d + j].real();
    }
    return m.sym();
}

}  // namespace

size_t TorusField::grid_size() const {
    size_t s = 1;
    for (int i = 0; i < dim; ++i) s *= side();
    return s;
}

size_t TorusField::index_of(const std::vector<int>& k) const {
    FreqBox box(dim, K);
    return box.index(k.data());
}

double TorusField::eval(const double* x, int component) const {
    FreqBox box(dim, K);
    std::vector<int> k(static_cast<size_t>(dim));
    double out = 0.0;
    const auto& f = coeffs[static_cast<size_t>(component)];
    for (size_t idx = 0; idx < f.size(); ++idx) {
        if (f[idx] == cplx(0.0, 0.0)) continue;
        box.decode(idx, k.data());
        double phase = 0.0;
        for (int i = 0; i < dim; ++i) phase += k[i] * x[i];
        out += (f[idx] * cplx(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase))).real();
    }
    return out;
}

PoissonSolveResult torus_poisson_solve(const PeriodicCoefficients& coeffs, int K, double tol,
                                       int maxit) {
    coeffs.validate();
    const int d = coeffs.d;
    if (K < coeffs.max_freq())
        throw std::invalid_argument("torus_poisson_solve: cutoff below the coefficient frequencies");
    const auto bounds = coeffs.ellipticity_bounds();
    if (!(bounds.first > 0.0))
        throw std::runtime_error("torus_poisson_solve: a^S not uniformly elliptic");

    const FreqBox box(d, K);
    const Mat abar = zero_mode_sym(coeffs);
    std::vector<double> precond(box.size(), 1.0);
    {
        std::vector<int> k(static_cast<size_t>(d));
        for (size_t idx = 0; idx < box.size(); ++idx) {
            box.decode(idx, k.data());
            double q = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) q += k[i] * abar(i, j) * k[j];
            precond[idx] = q > 0.0 ? kTwoPi * kTwoPi * q : 1.0;
        }
    }

    PoissonSolveResult res;
    res.phi.dim = d;
    res.phi.components = d;
    res.phi.K = K;
    res.phi.coeffs.resize(static_cast<size_t>(d));

    const FreqBox ext(d, K + coeffs.max_freq());
    double rsq = 0.0;
    for (int j = 0; j < d; ++j) {
        const std::vector<cplx> b = rhs_component(coeffs, box, j);
        std::vector<cplx> u(box.size(), cplx(0.0, 0.0));
        if (cnorm(b) > 0.0) u = bicgstab(coeffs, box, b, precond, maxit);
        // certified residual on the extended box (leakage included)
        std::vector<cplx> y;
        apply_operator(coeffs, box, ext, u, y);
        const std::vector<cplx> bext = rhs_component(coeffs, ext, j);
        for (size_t i = 0; i < ext.size(); ++i) {
            const cplx r = y[i] - bext[i];
            rsq += std::norm(r);
        }
        res.phi.coeffs[static_cast<size_t>(j)] = std::move(u);
    }
    res.residual = std::sqrt(rsq);
    if (!(res.residual <= tol))
        throw std::runtime_error("torus_poisson_solve: residual " + std::to_string(res.residual) +
                                 " above tolerance (cutoff K insufficient)");
    return res;
}

RoughLimitPrediction ou_predict() {
    const Mat a = OuParams::drift_rotation();
    const Mat eye = Mat::identity(2);
    // corrector Phi(x) = C x with C (I + A) = I, so C = (I - A)/2
    const Mat c = 0.5 * (eye - a);
    RoughLimitPrediction pred;
    pred.d = 2;
    pred.covariance = eye;  // 2 C C^T with C C^T = I/2
    pred.gamma_strato = matmul(matmul(c, a), c.transpose());
    pred.gap_prediction = Mat::zero(2);
    pred.ito_correction = 0.5 * pred.covariance + pred.gamma_strato - pred.gap_prediction;
    pred.provenance = Provenance::ClosedForm;
    return pred;
}

RoughLimitPrediction conductance_predict(const ConductanceLaw& law, const Mat& empirical_cov) {
    law.validate();
    const int d = empirical_cov.d;
    RoughLimitPrediction pred;
    pred.d = d;
    pred.covariance = empirical_cov;
    pred.gamma_strato = Mat::zero(d);
    pred.gap_prediction = law.mean() * Mat::identity(d);
    pred.ito_correction = 0.5 * pred.covariance + pred.gamma_strato - pred.gap_prediction;
    pred.provenance = Provenance::EmpiricalFormula;
    return pred;
}

RoughLimitPrediction periodic_predict(const PeriodicCoefficients& coeffs, const TorusField& phi) {
    if (phi.components != coeffs.d || phi.dim != coeffs.d)
        throw std::invalid_argument("periodic_predict: corrector missing or of wrong shape");
    const int d = coeffs.d;
    const FreqBox box(d, phi.K);
    const FreqBox ext(d, phi.K + coeffs.max_freq());

    std::vector<std::vector<std::vector<cplx>>> grad_plus_e, grad;
    for (int i = 0; i < d; ++i) {
        grad_plus_e.push_back(gradient_field(box, phi.coeffs[static_cast<size_t>(i)], i));
        grad.push_back(gradient_field(box, phi.coeffs[static_cast<size_t>(i)], -1));
    }

    RoughLimitPrediction pred;
    pred.d = d;
    pred.covariance = Mat(d);
    pred.gamma_strato = Mat(d);
    for (int j = 0; j < d; ++j) {
        const auto w_sym = multiply_field(coeffs, Part::Sym, box, grad_plus_e[static_cast<size_t>(j)], ext);
        const auto w_anti = multiply_field(coeffs, Part::Anti, box, grad[static_cast<size_t>(j)], ext);
        for (int i = 0; i < d; ++i) {
            pred.covariance(i, j) = 2.0 * parseval_dot(box, grad_plus_e[static_cast<size_t>(i)], ext, w_sym);
            pred.gamma_strato(i, j) = -parseval_dot(box, grad[static_cast<size_t>(i)], ext, w_anti);
        }
    }
    pred.gap_prediction = zero_mode_sym(coeffs);  // int a^S dx
    pred.ito_correction = 0.5 * pred.covariance + pred.gamma_strato - pred.gap_prediction;
    pred.provenance = Provenance::Spectral;
    return pred;
}

RoughLimitPrediction periodic_predict_spectral(const PeriodicCoefficients& coeffs, int K, double tol) {
    const PoissonSolveResult solve = torus_poisson_solve(coeffs, K, tol);
    RoughLimitPrediction pred = periodic_predict(coeffs, solve.phi);
    pred.residual = solve.residual;
    return pred;
}

}  // namespace roughwalk
