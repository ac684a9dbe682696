#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial twin with the
// same signature and a `_serial` suffix; the twins are the reference the
// parallel versions are tested and benchmarked against.

#include <span>

#include "nlch/sparse.hpp"

namespace nlch::kernels {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void spmv_serial(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);
double dot_serial(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_serial(double alpha, std::span<const double> x, std::span<double> y);

/// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);
void xpby_serial(std::span<const double> x, double beta, std::span<double> y);

/// z = a .* b
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> z);
void hadamard_serial(std::span<const double> a, std::span<const double> b, std::span<double> z);

double max_abs(std::span<const double> a);
double max_abs_serial(std::span<const double> a);

}  // namespace nlch::kernels
