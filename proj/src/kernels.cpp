#include "nlch/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace nlch::kernels {

namespace {
using index_t = std::ptrdiff_t;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
    const index_t n = static_cast<index_t>(a.rows);
    const std::size_t* rp = a.row_ptr.data();
    const std::size_t* ci = a.col.data();
    const double* av = a.val.data();
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += av[k] * x[ci[k]];
        y[i] = s;
    }
}

void spmv_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
        y[i] = s;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    const index_t n = static_cast<index_t>(a.size());
    double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (index_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot_serial(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const index_t n = static_cast<index_t>(x.size());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_serial(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
    const index_t n = static_cast<index_t>(x.size());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void xpby_serial(std::span<const double> x, double beta, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> z) {
    const index_t n = static_cast<index_t>(a.size());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) z[i] = a[i] * b[i];
}

void hadamard_serial(std::span<const double> a, std::span<const double> b, std::span<double> z) {
    for (std::size_t i = 0; i < a.size(); ++i) z[i] = a[i] * b[i];
}

double max_abs(std::span<const double> a) {
    const index_t n = static_cast<index_t>(a.size());
    double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
    for (index_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

double max_abs_serial(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace nlch::kernels
