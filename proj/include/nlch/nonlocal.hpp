#pragma once

#include <span>
#include <vector>

#include "nlch/mesh.hpp"
#include "nlch/sparse.hpp"

namespace nlch {

/// Gaussian interaction kernel J(d) = eps^-4 exp(-|d|^2 / (2 eps^2)).
/// Pairs with J below or equal to `cutoff` are dropped from J2.
struct KernelSpec {
    double epsilon = 0.014;
    double cutoff = 1e-6;
    void validate() const;
};

double kernel_eval(double dx, double dy, const KernelSpec& spec);

/// Lumped discrete convolution operators.
///   J2(i, j) = J(x_i - x_j) m_i m_j   (stored where J(x_i - x_j) > cutoff)
///   J1(i)    = sum_j J2(i, j)          (exact row sums of the stored J2)
struct KernelMatrices {
    std::vector<double> j1;
    CsrMatrix j2;
};

/// Stencil assembly: on the uniform mesh J(x_i - x_j) depends only on the
/// index offset, so kernel values are sampled once per offset. Row-parallel.
KernelMatrices assemble_kernel_matrices(const Mesh& mesh, const KernelSpec& spec);

/// Direct O(N^2) pairwise assembly. Reference for the stencil version.
KernelMatrices assemble_kernel_matrices_serial(const Mesh& mesh, const KernelSpec& spec);

/// Nodal values of (J * eta)_h: (J2 eta)_i / m_i.
NodalField conv_lumped(std::span<const double> eta, const KernelMatrices& km, const Mesh& mesh);

/// (J * 1)_h at the nodes, J1_i / m_i.
NodalField conv_one(const KernelMatrices& km, const Mesh& mesh);

/// (J * a, b)^{h^2} = b^T J2 a.
double conv_product(std::span<const double> a, std::span<const double> b, const KernelMatrices& km);

/// ((J*1)_h a, b)^h = sum_i J1_i a_i b_i.
double conv_one_product(std::span<const double> a, std::span<const double> b, const KernelMatrices& km);

}  // namespace nlch
