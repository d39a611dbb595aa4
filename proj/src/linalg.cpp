#include "roughwalk/linalg.hpp"

#include <algorithm>

namespace roughwalk {

Mat matmul(const Mat& x, const Mat& y) {
    Mat r(x.d);
    for (int i = 0; i < x.d; ++i)
        for (int k = 0; k < x.d; ++k) {
            const double xik = x(i, k);
            if (xik == 0.0) continue;
            for (int j = 0; j < x.d; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

Vec matvec(const Mat& m, const Vec& v) {
    Vec r(m.d, 0.0);
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) r[i] += m(i, j) * v[j];
    return r;
}

Mat outer(const Vec& u, const Vec& v) {
    Mat r(static_cast<int>(u.size()));
    for (size_t i = 0; i < u.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = u[i] * v[j];
    return r;
}

double dot(const Vec& u, const Vec& v) {
    double s = 0.0;
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double norm2(const Vec& u) { return std::sqrt(dot(u, u)); }

void jacobi_eigen(const Mat& m, Vec& eigenvalues, Mat& eigenvectors) {
    const int d = m.d;
    Mat a = m.sym();
    Mat v = Mat::identity(d);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-300) break;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    eigenvalues.assign(d, 0.0);
    for (int i = 0; i < d; ++i) eigenvalues[i] = a(i, i);
    eigenvectors = v;
}

Mat sqrt_sym_psd(const Mat& m, double tol) {
    Vec w;
    Mat v;
    jacobi_eigen(m, w, v);
    const int d = m.d;
    for (int i = 0; i < d; ++i) {
        if (w[i] < -tol)
            throw std::runtime_error("sqrt_sym_psd: matrix not positive semi-definite (eigenvalue " +
                                     std::to_string(w[i]) + ")");
        if (w[i] < 0.0) w[i] = 0.0;
    }
    Mat r(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += v(i, k) * std::sqrt(w[k]) * v(j, k);
            r(i, j) = s;
        }
    return r;
}

Mat cholesky(const Mat& m) {
    const int d = m.d;
    Mat l(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

double min_eigenvalue_sym(const Mat& m) {
    Vec w;
    Mat v;
    jacobi_eigen(m, w, v);
    return *std::min_element(w.begin(), w.end());
}

}  // namespace roughwalk
