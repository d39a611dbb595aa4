#include "roughwalk/rde.hpp"

#include <cmath>
#include <stdexcept>

namespace roughwalk {

VectorField VectorField::constant(const Mat& m) {
    VectorField f;
    f.dy = m.d;
    f.dx = m.d;
    f.sigma = [m](const Vec&) { return m; };
    f.dsigma = [](int, int, int, const Vec&) { return 0.0; };
    return f;
}

VectorField VectorField::linear(const Vec& c) {
    const int d = static_cast<int>(c.size());
    VectorField f;
    f.dy = d;
    f.dx = d;
    f.sigma = [c, d](const Vec& y) {
        Mat m(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = c[static_cast<size_t>(j)] * y[static_cast<size_t>(i)];
        return m;
    };
    f.dsigma = [c](int k, int i, int j, const Vec&) {
        return k == i ? c[static_cast<size_t>(j)] : 0.0;
    };
    return f;
}

VectorField VectorField::sine(const Mat& p, const Mat& q, double wavelength) {
    const int d = p.d;
    VectorField f;
    f.dy = d;
    f.dx = d;
    // direction u_{ij} = wavelength * (e_{(i+j) mod d} + 0.3 e_{(i+2j+1) mod d})
    auto udir = [d, wavelength](int i, int j, int comp) {
        double u = 0.0;
        if (comp == (i + j) % d) u += 1.0;
        if (comp == (i + 2 * j + 1) % d) u += 0.3;
        return wavelength * u;
    };
    f.sigma = [p, q, udir, d](const Vec& y) {
        Mat m(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double phase = 0.0;
                for (int k = 0; k < d; ++k) phase += udir(i, j, k) * y[static_cast<size_t>(k)];
                m(i, j) = p(i, j) + q(i, j) * std::sin(phase);
            }
        return m;
    };
    f.dsigma = [q, udir, d](int k, int i, int j, const Vec& y) {
        double phase = 0.0;
        for (int c = 0; c < d; ++c) phase += udir(i, j, c) * y[static_cast<size_t>(c)];
        return q(i, j) * std::cos(phase) * udir(i, j, k);
    };
    return f;
}

namespace {

SampledPath euler_over_increments(const std::vector<double>& times, const std::vector<double>& incs,
                                  size_t nsteps, int dx, const VectorField& field, const Vec& y0) {
    if (static_cast<int>(y0.size()) != field.dy)
        throw std::invalid_argument("euler_driven: initial value has wrong dimension");
    SampledPath out;
    out.d = field.dy;
    out.interp = Interp::GridSamples;
    out.times = times;
    out.values.reserve(times.size() * static_cast<size_t>(field.dy));
    Vec y = y0;
    out.values.insert(out.values.end(), y.begin(), y.end());
    for (size_t k = 0; k < nsteps; ++k) {
        const Mat s = field.sigma(y);
        Vec ynext = y;
        for (int i = 0; i < field.dy; ++i) {
            double dy = 0.0;
            for (int j = 0; j < dx; ++j) dy += s(i, j) * incs[k * static_cast<size_t>(dx) + j];
            ynext[static_cast<size_t>(i)] += dy;
        }
        y = std::move(ynext);
        out.values.insert(out.values.end(), y.begin(), y.end());
    }
    return out;
}

}  // namespace

SampledPath euler_driven(const JumpPath& driver, const VectorField& field, const Vec& y0) {
    driver.validate();
    if (driver.d != field.dx) throw std::invalid_argument("euler_driven: driver/field dimension mismatch");
    std::vector<double> times;
    times.reserve(driver.njumps() + 2);
    times.push_back(0.0);
    for (double t : driver.times) times.push_back(t);
    const bool pad = driver.times.empty() || driver.times.back() < driver.horizon;
    std::vector<double> incs = driver.increments;
    if (pad) {
        times.push_back(driver.horizon);
        incs.insert(incs.end(), static_cast<size_t>(driver.d), 0.0);
    }
    return euler_over_increments(times, incs, incs.size() / driver.d, driver.d, field, y0);
}

SampledPath euler_driven(const SampledPath& driver, const VectorField& field, const Vec& y0) {
    driver.validate();
    if (driver.d != field.dx) throw std::invalid_argument("euler_driven: driver/field dimension mismatch");
    const size_t nsteps = driver.npoints() - 1;
    std::vector<double> incs(nsteps * static_cast<size_t>(driver.d));
    for (size_t k = 0; k < nsteps; ++k)
        for (int i = 0; i < driver.d; ++i)
            incs[k * driver.d + i] = driver.values[(k + 1) * driver.d + i] - driver.values[k * driver.d + i];
    return euler_over_increments(driver.times, incs, nsteps, driver.d, field, y0);
}

Vec correction_drift(const VectorField& field, const Mat& gamma, const Vec& y) {
    if (gamma.d != field.dx) throw std::invalid_argument("correction_drift: Gamma has wrong dimension");
    const Mat s = field.sigma(y);
    Vec drift(static_cast<size_t>(field.dy), 0.0);
    for (int i = 0; i < field.dy; ++i) {
        double acc = 0.0;
        for (int j = 0; j < field.dx; ++j)
            for (int k = 0; k < field.dy; ++k) {
                double dkij = 0.0;
                for (int l = 0; l < field.dx; ++l) {
                    const double g = gamma(j, l);
                    if (g == 0.0) continue;
                    dkij += s(k, l) * g;
                }
                if (dkij != 0.0) acc += field.dsigma(k, i, j, y) * dkij;
            }
        drift[static_cast<size_t>(i)] = acc;
    }
    return drift;
}

SampledPath euler_corrected_limit(const VectorField& field, const Mat& covariance, const Mat& gamma,
                                  const Vec& y0, double horizon, double step, Rng& rng) {
    if (gamma.d != field.dx) throw std::invalid_argument("euler_corrected_limit: missing or mismatched Gamma");
    if (!(step > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("euler_corrected_limit: step and horizon must be positive");
    const Mat chol = cholesky(covariance);
    const int dx = field.dx;

    SampledPath out;
    out.d = field.dy;
    out.interp = Interp::GridSamples;
    Vec y = y0;
    out.times.push_back(0.0);
    out.values.insert(out.values.end(), y.begin(), y.end());
    Vec xi(static_cast<size_t>(dx)), db(static_cast<size_t>(dx));
    double t = 0.0;
    while (t < horizon * (1.0 - 1e-15)) {
        double h = step;
        if (t + step > horizon) h = horizon - t;
        const double sh = std::sqrt(h);
        for (int i = 0; i < dx; ++i) xi[static_cast<size_t>(i)] = rng.normal();
        for (int i = 0; i < dx; ++i) {
            double v = 0.0;
            for (int j = 0; j <= i; ++j) v += chol(i, j) * xi[static_cast<size_t>(j)];
            db[static_cast<size_t>(i)] = sh * v;
        }
        const Mat s = field.sigma(y);
        const Vec drift = correction_drift(field, gamma, y);
        for (int i = 0; i < field.dy; ++i) {
            double dy = drift[static_cast<size_t>(i)] * h;
            for (int j = 0; j < dx; ++j) dy += s(i, j) * db[static_cast<size_t>(j)];
            y[static_cast<size_t>(i)] += dy;
        }
        t = (t + h >= horizon * (1.0 - 1e-15)) ? horizon : t + h;
        out.times.push_back(t);
        out.values.insert(out.values.end(), y.begin(), y.end());
    }
    return out;
}

CompareReport compare_laws(const std::vector<double>& samples_a, const std::vector<double>& samples_b,
                           int d) {
    if (d <= 0) throw std::invalid_argument("compare_laws: dimension must be positive");
    const size_t ma = samples_a.size() / static_cast<size_t>(d);
    const size_t mb = samples_b.size() / static_cast<size_t>(d);
    if (ma < 1000 || mb < 1000)
        throw std::invalid_argument("compare_laws: need at least 1000 samples per side");

    CompareReport rep;
    for (int i = 0; i < d; ++i) {
        CoordinateGap g;
        double sa = 0.0, sb = 0.0;
        for (size_t r = 0; r < ma; ++r) sa += samples_a[r * d + i];
        for (size_t r = 0; r < mb; ++r) sb += samples_b[r * d + i];
        g.mean_a = sa / static_cast<double>(ma);
        g.mean_b = sb / static_cast<double>(mb);
        double va = 0.0, vb = 0.0, qa = 0.0, qb = 0.0;  // central 2nd and 4th moments
        for (size_t r = 0; r < ma; ++r) {
            const double c = samples_a[r * d + i] - g.mean_a;
            va += c * c;
            qa += c * c * c * c;
        }
        for (size_t r = 0; r < mb; ++r) {
            const double c = samples_b[r * d + i] - g.mean_b;
            vb += c * c;
            qb += c * c * c * c;
        }
        va /= static_cast<double>(ma - 1);
        vb /= static_cast<double>(mb - 1);
        qa /= static_cast<double>(ma);
        qb /= static_cast<double>(mb);
        g.var_a = va;
        g.var_b = vb;
        g.gap = g.mean_a - g.mean_b;
        g.stderr_gap = std::sqrt(va / static_cast<double>(ma) + vb / static_cast<double>(mb));
        g.zscore = g.stderr_gap > 0.0 ? g.gap / g.stderr_gap : 0.0;
        g.var_gap = va - vb;
        g.var_stderr = std::sqrt(std::max(qa - va * va, 0.0) / static_cast<double>(ma) +
                                 std::max(qb - vb * vb, 0.0) / static_cast<double>(mb));
        g.var_zscore = g.var_stderr > 0.0 ? g.var_gap / g.var_stderr : 0.0;
        rep.coords.push_back(g);
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(g.zscore));
        rep.max_abs_var_z = std::max(rep.max_abs_var_z, std::abs(g.var_zscore));
    }
    return rep;
}

}  // namespace roughwalk
