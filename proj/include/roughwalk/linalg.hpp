#pragma once

// Small dense d-by-d matrices and vectors (d is the path dimension, typically 1..3).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughwalk {

using Vec = std::vector<double>;

struct Mat {
    int d = 0;
    std::vector<double> a;  // row-major, d*d entries

    Mat() = default;
    explicit Mat(int dim) : d(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

    static Mat zero(int dim) { return Mat(dim); }
    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * d + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * d + j]; }

    Mat& operator+=(const Mat& o) {
        for (size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (size_t k = 0; k < a.size(); ++k) a[k] -= o.a[k];
        return *this;
    }
    Mat& operator*=(double s) {
        for (double& x : a) x *= s;
        return *this;
    }

    friend Mat operator+(Mat m, const Mat& o) { return m += o; }
    friend Mat operator-(Mat m, const Mat& o) { return m -= o; }
    friend Mat operator*(Mat m, double s) { return m *= s; }
    friend Mat operator*(double s, Mat m) { return m *= s; }

    Mat transpose() const {
        Mat t(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    Mat sym() const {
        Mat s(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
        return s;
    }
    Mat antisym() const {
        Mat s(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s(i, j) = 0.5 * ((*this)(i, j) - (*this)(j, i));
        return s;
    }
    double trace() const {
        double t = 0.0;
        for (int i = 0; i < d; ++i) t += (*this)(i, i);
        return t;
    }
    double frobenius() const {
        double s = 0.0;
        for (double x : a) s += x * x;
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0.0;
        for (double x : a) m = std::max(m, std::abs(x));
        return m;
    }
};

Mat matmul(const Mat& x, const Mat& y);
Vec matvec(const Mat& m, const Vec& v);
Mat outer(const Vec& u, const Vec& v);

double dot(const Vec& u, const Vec& v);
double norm2(const Vec& u);

// Cyclic Jacobi eigendecomposition of a symmetric matrix: m = V diag(w) V^T.
// Columns of V are the eigenvectors.
void jacobi_eigen(const Mat& m, Vec& eigenvalues, Mat& eigenvectors);

// Symmetric PSD square root. Throws std::runtime_error when an eigenvalue is
// below -tol (the caller passes a matrix that must be positive semi-definite).
Mat sqrt_sym_psd(const Mat& m, double tol = 1e-12);

// Lower-triangular Cholesky factor of an SPD matrix.
Mat cholesky(const Mat& m);

double min_eigenvalue_sym(const Mat& m);

}  // namespace roughwalk
