#pragma once

// The three model classes: random-conductance walk on Z^d, the non-reversible
// 2-d Ornstein-Uhlenbeck process, and diffusions with periodic coefficients.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "roughwalk/linalg.hpp"
#include "roughwalk/paths.hpp"
#include "roughwalk/rng.hpp"

namespace roughwalk {

// ---------- random conductances ----------

struct ConductanceLaw {
    enum class Type { Constant, Uniform, TwoPoint };
    Type type = Type::Constant;
    double a = 1.0;  // Constant: the value; Uniform: lower end; TwoPoint: first atom
    double b = 1.0;  // Uniform: upper end; TwoPoint: second atom
    double q = 0.5;  // TwoPoint: probability of atom a

    static ConductanceLaw constant(double kappa) { return {Type::Constant, kappa, kappa, 0.0}; }
    static ConductanceLaw uniform(double lo, double hi) { return {Type::Uniform, lo, hi, 0.0}; }
    static ConductanceLaw two_point(double a, double b, double q) { return {Type::TwoPoint, a, b, q}; }

    double mean() const;
    double lo() const;
    double hi() const;
    double from_u01(double u) const;
    void validate() const;  // support must sit in [c, C] with c > 0
};

struct BondKey {
    std::array<int64_t, 3> site{};  // canonical endpoint (the lower one along the axis)
    int axis = 0;
    bool operator==(const BondKey&) const = default;
};
struct BondKeyHash {
    size_t operator()(const BondKey& k) const {
        uint64_t h = 0x8f3a9c1bd42e65f7ULL;
        for (int64_t c : k.site) h = mix64(h, static_cast<uint64_t>(c));
        return static_cast<size_t>(mix64(h, static_cast<uint64_t>(k.axis)));
    }
};

// Bond weights are a pure function of (seed, bond), drawn by hashing the bond
// coordinates into the stream, so the realized environment is independent of
// the visit order and needs no storage in annealed mode. Quenched mode
// pre-generates a frozen map over a declared box and rejects lookups outside
// it.
class ConductanceEnvironment {
  public:
    ConductanceEnvironment(int dim, ConductanceLaw law, uint64_t seed);

    int dim() const { return d_; }
    const ConductanceLaw& law() const { return law_; }

    // Weight of the bond {site, site + e_axis}.
    double weight(const int64_t* site, int axis) const;

    // Freeze the environment over the box [lo, hi]^d (per-coordinate bounds on
    // bond base points). After this call lookups outside the box throw.
    void freeze_box(const std::vector<int64_t>& lo, const std::vector<int64_t>& hi);
    bool quenched() const { return quenched_; }

  private:
    double draw(const BondKey& key) const;
    int d_;
    ConductanceLaw law_;
    uint64_t seed_;
    bool quenched_ = false;
    std::unordered_map<BondKey, double, BondKeyHash> frozen_;
};

// Continuous-time random walk from the origin: at site x the walker waits an
// exponential time with rate sum of incident bond weights and jumps across a
// bond with probability proportional to its weight. Rates are bounded by 2dC,
// so the walk exists for all times.
JumpPath simulate_conductance_walk(const ConductanceEnvironment& env, double horizon, Rng& rng);

// ---------- non-reversible Ornstein-Uhlenbeck (d = 2) ----------

// dX = -(I + A) X dt + sqrt(2) dW with A = [[0,-1],[1,0]], X_0 ~ N(0, I).
// Exact Gaussian transitions on the grid: e^{-(I+A)h} = e^{-h} R(-h) because
// A^2 = -I, and the step noise is N(0, (1 - e^{-2h}) I).
struct OuParams {
    static Mat drift_rotation() {
        Mat a(2);
        a(0, 1) = -1.0;
        a(1, 0) = 1.0;
        return a;
    }
};
SampledPath simulate_ou(double micro_horizon, double step, Rng& rng);

// Z^n_t = n^{-1/2} int_0^{nt} F(X_r) dr on the macroscopic grid, trapezoidal
// quadrature along the grid of the microscopic path. out_dim is the dimension
// of F's values.
using Observable = std::function<void(const double* x, double* out)>;
SampledPath additive_functional(const SampledPath& micro, double n, const Observable& f, int out_dim);

// ---------- periodic diffusions ----------

struct FourierMode {
    std::vector<int> k;                   // integer frequency vector
    std::vector<std::complex<double>> m;  // d*d row-major coefficient matrix
};

// Z^d-periodic smooth matrix field given as a truncated Fourier series,
// Hermitian-symmetric in k so the field is real.
struct PeriodicCoefficients {
    int d = 0;
    std::vector<FourierMode> modes;

    void validate() const;
    int max_freq() const;
    Mat a_at(const double* x) const;
    Mat aS_at(const double* x) const;
    Mat aA_at(const double* x) const;
    Vec b_at(const double* x) const;  // b_j = sum_i d_i a_{ij}
    double max_drift_bound() const;   // sup-norm bound for |b| from the series
    bool aS_is_constant(double tol = 0.0) const;
    // min/max eigenvalue of a^S over a sampling grid
    std::pair<double, double> ellipticity_bounds(int samples_per_dim = 17) const;

    static PeriodicCoefficients identity(int dim);
    // d = 2: a = I + kappa * [[0, s], [-s, 0]] with s = sin(2 pi x1) sin(2 pi x2)
    static PeriodicCoefficients antisym_sin2(double kappa);
    // d = 1: a(x) = a0 + a1 cos(2 pi x)
    static PeriodicCoefficients d1_cosine(double a0, double a1);
};

struct PeriodicSimOptions {
    bool cache_sigma = false;  // nearest-grid sigma cache, off by default
    int cache_resolution = 64;
};

// Euler-Maruyama for dX = b(X) dt + sqrt(2) sigma(X) dW, sigma = sqrt(a^S),
// X_0 uniform on [-1/2, 1/2]^d. Throws when a^S fails to be positive definite
// at an evaluation point.
SampledPath simulate_periodic_diffusion(const PeriodicCoefficients& coeffs, double micro_horizon,
                                        double step, Rng& rng,
                                        const PeriodicSimOptions& opts = {});

}  // namespace roughwalk
