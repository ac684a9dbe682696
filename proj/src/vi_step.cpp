#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"
#include "nlch/solver.hpp"
#include "step_data.hpp"

namespace nlch {

namespace detail {

StepData make_step_data(std::span<const double> phi_prev, const StepOperators& ops,
                        const KernelMatrices& km, const Mesh& mesh, const PotentialParams& pot,
                        double dt, double lambda) {
    pot.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const std::size_t n = mesh.num_nodes();
    if (phi_prev.size() != n || ops.mhat.size() != n || km.j1.size() != n) {
        throw std::invalid_argument("step inputs do not match the mesh");
    }

    StepData s(PointwiseEnergy(pot, lambda));
    s.dt = dt;
    s.eps = pot.epsilon;
    s.num_components = ops.partition.components.size();

    std::vector<double> conv_prev(n);
    kernels::spmv(km.j2, phi_prev, conv_prev);

    std::vector<std::ptrdiff_t> local(n, -1);
    for (std::size_t j = 0; j < n; ++j) {
        if (ops.partition.is_passive(j)) continue;
        local[j] = static_cast<std::ptrdiff_t>(s.active.size());
        s.active.push_back(j);
        s.component.push_back(ops.partition.component_of[j]);
        const double m = mesh.lumped_mass[j];
        s.mass.push_back(m);
        s.d.push_back(pot.epsilon * km.j1[j]);
        s.c.push_back(m / pot.epsilon * psi2_prime(phi_prev[j], pot) - pot.epsilon * conv_prev[j]);
        s.phi_prev.push_back(phi_prev[j]);
    }

    const std::size_t na = s.active.size();
    s.a.rows = na;
    s.a.cols = na;
    s.a.row_ptr.assign(na + 1, 0);
    for (std::size_t li = 0; li < na; ++li) {
        const std::size_t i = s.active[li];
        for (std::size_t k = ops.ahat.row_ptr[i]; k < ops.ahat.row_ptr[i + 1]; ++k) {
            const std::ptrdiff_t lj = local[ops.ahat.col[k]];
            if (lj < 0) continue;
            s.a.col.push_back(static_cast<std::size_t>(lj));
            s.a.val.push_back(ops.ahat.val[k]);
        }
        s.a.row_ptr[li + 1] = s.a.col.size();
    }
    s.a_diag = s.a.diagonal();
    return s;
}

void project_components(const StepData& s, std::span<double> v) {
    std::vector<double> sum(s.num_components, 0.0);
    std::vector<double> count(s.num_components, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        sum[static_cast<std::size_t>(s.component[i])] += v[i];
        count[static_cast<std::size_t>(s.component[i])] += 1.0;
    }
    for (std::size_t m = 0; m < s.num_components; ++m) sum[m] /= count[m];
    for (std::size_t i = 0; i < s.size(); ++i) v[i] -= sum[static_cast<std::size_t>(s.component[i])];
}

std::size_t solve_active_pinv(const StepData& s, std::span<const double> rhs, std::span<double> w,
                              double rel_tol) {
    std::vector<double> inv_diag(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) inv_diag[i] = 1.0 / s.a_diag[i];
    std::fill(w.begin(), w.end(), 0.0);
    CgOptions opts;
    opts.rel_tol = rel_tol;
    opts.max_iters = 20 * s.size() + 100;
    const CgResult res = conjugate_gradient(
        [&s](std::span<const double> in, std::span<double> out) { kernels::spmv(s.a, in, out); }, inv_diag,
        rhs, w, opts, [&s](std::span<double> v) { project_components(s, v); });
    if (!res.converged) {
        throw SolverError("mobility stiffness solve did not converge (relative residual " +
                              std::to_string(res.rel_residual) + ")",
                          {}, res.rel_residual);
    }
    return res.iterations;
}

}  // namespace detail

namespace {

void check_state(std::span<const double> phi_prev, bool require_below_one) {
    for (double v : phi_prev) {
        if (!(v >= 0.0)) throw std::invalid_argument("phi_prev must be nonnegative");
        if (require_below_one && !(v < 1.0)) throw std::invalid_argument("phi_prev must be below 1");
    }
}

StepResult run_step(std::span<const double> phi_prev, std::span<const double> mu_prev, double lambda,
                    const StepOperators& ops, const KernelMatrices& km, const Mesh& mesh,
                    const PotentialParams& pot, double dt, const SolverOptions& options) {
    const detail::StepData s = detail::make_step_data(phi_prev, ops, km, mesh, pot, dt, lambda);
    const std::size_t n = mesh.num_nodes();

    StepResult out;
    out.phi_new.assign(phi_prev.begin(), phi_prev.end());
    out.mu_new.assign(n, 0.0);
    out.eta.assign(n, 0.0);
    out.floored_elements = ops.floored_elements;
    if (s.size() == 0) return out;

    detail::LocalSolution sol;
    if (options.method == SolverMethod::newton) {
        std::vector<double> mu0(s.size(), 0.0);
        if (mu_prev.size() == n) {
            for (std::size_t i = 0; i < s.size(); ++i) mu0[i] = mu_prev[s.active[i]];
        }
        sol = detail::solve_dual_newton(s, mu0, options);
    } else {
        sol = detail::solve_projected_gradient(s, options);
    }

    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::size_t j = s.active[i];
        out.phi_new[j] = sol.phi[i];
        out.mu_new[j] = sol.mu[i];
        out.eta[j] = sol.eta[i];
    }
    out.iterations = sol.iterations;
    out.inner_iterations = sol.inner_iterations;
    out.residual = sol.residual;
    out.last_update = sol.last_update;
    return out;
}

}  // namespace

StepResult solve_vi_step(std::span<const double> phi_prev, std::span<const double> mu_prev,
                         const StepOperators& ops, const KernelMatrices& km, const Mesh& mesh,
                         const PotentialParams& pot, const MobilityParams& mob, double dt,
                         const SolverOptions& options) {
    mob.validate();
    check_state(phi_prev, true);
    return run_step(phi_prev, mu_prev, 0.0, ops, km, mesh, pot, dt, options);
}

StepResult solve_regularized_step(std::span<const double> phi_prev, std::span<const double> mu_prev,
                                  double lambda, const StepOperators& ops, const KernelMatrices& km,
                                  const Mesh& mesh, const PotentialParams& pot,
                                  const MobilityParams& mob, double dt, const SolverOptions& options) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
    mob.validate();
    check_state(phi_prev, true);
    return run_step(phi_prev, mu_prev, lambda, ops, km, mesh, pot, dt, options);
}

double ComplementarityReport::max() const {
    return std::max({stationarity, sign, complementarity, mass});
}

ComplementarityReport complementarity_residual(std::span<const double> phi_prev,
                                               std::span<const double> phi_new,
                                               std::span<const double> eta,
                                               const StepOperators& ops, const KernelMatrices& km,
                                               const Mesh& mesh, const PotentialParams& pot,
                                               double dt) {
    const detail::StepData s = detail::make_step_data(phi_prev, ops, km, mesh, pot, dt, 0.0);
    ComplementarityReport rep;
    if (s.size() == 0) return rep;

    const NodalField mu_tilde = recover_mu(phi_new, phi_prev, ops, dt);

    // g_i = e_i'(phi_i) - m_i mu_tilde_i - eta_i must equal gamma_m m_i.
    std::vector<double> g(s.size());
    double scale = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::size_t j = s.active[i];
        const double slope = s.energy.slope(phi_new[j], s.mass[i], s.d[i], s.c[i]);
        scale = std::max(scale, std::abs(slope) / s.mass[i]);
        g[i] = slope - s.mass[i] * mu_tilde[j] - eta[j];
    }

    std::vector<double> num(s.num_components, 0.0), den(s.num_components, 0.0);
    std::vector<double> mass_new(s.num_components, 0.0), mass_old(s.num_components, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto m = static_cast<std::size_t>(s.component[i]);
        const std::size_t j = s.active[i];
        if (phi_new[j] > 0.0) {
            num[m] += g[i];
            den[m] += s.mass[i];
        }
        mass_new[m] += s.mass[i] * phi_new[j];
        mass_old[m] += s.mass[i] * s.phi_prev[i];
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto m = static_cast<std::size_t>(s.component[i]);
        const std::size_t j = s.active[i];
        const double gamma = den[m] > 0.0 ? num[m] / den[m] : 0.0;
        rep.stationarity = std::max(rep.stationarity, std::abs(g[i] - gamma * s.mass[i]) / (s.mass[i] * scale));
        rep.sign = std::max({rep.sign, -phi_new[j], -eta[j] / (s.mass[i] * scale)});
        rep.complementarity = std::max(rep.complementarity, std::abs(eta[j] * phi_new[j]) / (s.mass[i] * scale));
    }
    for (std::size_t m = 0; m < s.num_components; ++m) {
        rep.mass = std::max(rep.mass, std::abs(mass_new[m] - mass_old[m]) / std::max(mass_old[m], 1e-300));
    }
    rep.sign = std::max(rep.sign, 0.0);
    return rep;
}

}  // namespace nlch
