#include <cmath>
#include <stdexcept>

#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"
#include "nlch/solver.hpp"

namespace nlch {

NodalField discrete_green_apply(std::span<const double> v, const Mesh& mesh) {
    const std::size_t n = mesh.num_nodes();
    if (v.size() != n) throw std::invalid_argument("discrete_green_apply: size mismatch");

    double total = 0.0, area = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += mesh.lumped_mass[i] * v[i];
        area += mesh.lumped_mass[i];
        scale += mesh.lumped_mass[i] * std::abs(v[i]);
    }
    if (std::abs(total) > 1e-10 * (scale + area)) {
        throw std::invalid_argument("discrete_green_apply: v must have zero lumped mean");
    }

    const std::vector<double> coeff(mesh.num_elements(), 1.0);
    const CsrMatrix a = assemble_stiffness(mesh, coeff);
    NodalField rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = mesh.lumped_mass[i] * v[i];

    const auto remove_mean = [n](std::span<double> x) {
        double mean = 0.0;
        for (double xi : x) mean += xi;
        mean /= static_cast<double>(n);
        for (double& xi : x) xi -= mean;
    };
    std::vector<double> inv_diag = a.diagonal();
    for (double& d : inv_diag) d = 1.0 / d;
    NodalField g(n, 0.0);
    CgOptions opts;
    opts.rel_tol = 1e-12;
    opts.max_iters = 20 * n + 100;
    const CgResult res = conjugate_gradient(
        [&a](std::span<const double> in, std::span<double> out) { kernels::spmv(a, in, out); }, inv_diag, rhs,
        g, opts, remove_mean);
    if (!res.converged) throw SolverError("discrete Green solve did not converge", {}, res.rel_residual);

    double lumped_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) lumped_mean += mesh.lumped_mass[i] * g[i];
    lumped_mean /= area;
    for (double& gi : g) gi -= lumped_mean;
    return g;
}

}  // namespace nlch
