#include <algorithm>
#include <stdexcept>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"
#include "nlch/solver.hpp"

namespace nlch {

namespace {

constexpr double kCoefficientFloor = 1e-14;

}  // namespace

void StepOperators::project_range(std::span<double> v) const {
    for (const auto& comp : partition.components) {
        double mean = 0.0;
        for (std::size_t j : comp) mean += v[j];
        mean /= static_cast<double>(comp.size());
        for (std::size_t j : comp) v[j] -= mean;
    }
}

NodalField StepOperators::solve_ahat(std::span<const double> rhs, double rel_tol) const {
    const std::size_t n = ahat.rows;
    NodalField x(n, 0.0);
    std::vector<double> inv_diag = ahat.diagonal();
    for (double& d : inv_diag) d = 1.0 / d;
    CgOptions opts;
    opts.rel_tol = rel_tol;
    opts.max_iters = 20 * n + 100;
    const CgResult res = conjugate_gradient(
        [this](std::span<const double> in, std::span<double> out) { kernels::spmv(ahat, in, out); },
        inv_diag, rhs, x, opts, [this](std::span<double> v) { project_range(v); });
    if (!res.converged) {
        throw SolverError("mobility stiffness solve did not converge (relative residual " +
                              std::to_string(res.rel_residual) + " after " +
                              std::to_string(res.iterations) + " iterations)",
                          {}, res.rel_residual);
    }
    // Passive rows are identity rows and sit outside every component, so the
    // range projection leaves them untouched; CG already reproduced rhs there.
    return x;
}

StepOperators build_step_operators(std::span<const double> phi_prev, const NodePartition& part,
                                   const Mesh& mesh, const MobilityParams& mob) {
    const std::size_t n = mesh.num_nodes();
    if (phi_prev.size() != n || part.component_of.size() != n) {
        throw std::invalid_argument("build_step_operators: sizes do not match the mesh");
    }
    mob.validate();

    StepOperators ops;
    ops.partition = part;
    ops.element_coeff.resize(mesh.num_elements());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.elements[e];
        const double mean = (phi_prev[t[0]] + phi_prev[t[1]] + phi_prev[t[2]]) / 3.0;
        double coeff = mobility(mean, mob);
        const bool all_active = !part.is_passive(t[0]) && !part.is_passive(t[1]) && !part.is_passive(t[2]);
        const bool couples = mob.alpha == 0.0 || mean > 0.0;
        if (all_active && couples && coeff < kCoefficientFloor) {
            coeff = kCoefficientFloor;
            ++ops.floored_elements;
        }
        ops.element_coeff[e] = coeff;
    }

    ops.ahat = assemble_stiffness(mesh, ops.element_coeff);
    for (std::size_t i = 0; i < n; ++i) {
        const bool row_passive = part.is_passive(i);
        for (std::size_t k = ops.ahat.row_ptr[i]; k < ops.ahat.row_ptr[i + 1]; ++k) {
            const std::size_t j = ops.ahat.col[k];
            if (row_passive || part.is_passive(j)) ops.ahat.val[k] = (i == j) ? 1.0 : 0.0;
        }
    }

    ops.mhat.resize(n);
    for (std::size_t i = 0; i < n; ++i) ops.mhat[i] = part.is_passive(i) ? 1.0 : mesh.lumped_mass[i];

    for (std::size_t i = 0; i < n; ++i) {
        const double d = ops.ahat.at(i, i);
        if (!(d > 0.0)) {
            throw SolverError("modified mobility stiffness has non-positive diagonal at node " +
                              std::to_string(i) + " (value " + std::to_string(d) + ")");
        }
    }
    return ops;
}

NodalField apply_Q(std::span<const double> v, const StepOperators& ops, const KernelMatrices& km,
                   double dt, double eps) {
    if (!(dt > 0.0)) throw std::invalid_argument("apply_Q: dt must be positive");
    const std::size_t n = v.size();
    if (n != ops.mhat.size()) throw std::invalid_argument("apply_Q: field size does not match the operators");
    NodalField mv(n);
    kernels::hadamard(ops.mhat, v, mv);
    NodalField w = ops.solve_ahat(mv);
    NodalField out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = eps * km.j1[i] * v[i] + ops.mhat[i] * w[i] / dt;
    return out;
}

NodalField recover_mu(std::span<const double> phi_new, std::span<const double> phi_prev,
                      const StepOperators& ops, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("recover_mu: dt must be positive");
    const std::size_t n = ops.mhat.size();
    if (phi_new.size() != n || phi_prev.size() != n) {
        throw std::invalid_argument("recover_mu: field size does not match the operators");
    }
    NodalField rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -ops.mhat[i] * (phi_new[i] - phi_prev[i]) / dt;
    return ops.solve_ahat(rhs);
}

}  // namespace nlch
