#include <algorithm>
#include <cmath>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"
#include "step_data.hpp"

namespace nlch::detail {

namespace {

// Primal response phi(mu) and the dual objective
//   G(mu) = (dt/2) mu^T a mu + sum_i [ e_i^*(m_i mu_i) - m_i phi_prev_i mu_i ].
struct DualState {
    std::vector<double> phi;
    std::vector<double> a_mu;
    double value = 0.0;
};

void evaluate(const StepData& s, std::span<const double> mu, DualState& st) {
    const std::size_t n = s.size();
    st.phi.resize(n);
    st.a_mu.resize(n);
    kernels::spmv(s.a, mu, st.a_mu);
    double value = 0.0;
#pragma omp parallel for reduction(+ : value) schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        const double sm = s.mass[i] * mu[i];
        const double phi = s.energy.minimizer(sm, s.mass[i], s.d[i], s.c[i]);
        st.phi[i] = phi;
        const double conj = phi > 0.0 ? sm * phi - s.energy.value(phi, s.mass[i], s.d[i], s.c[i]) : 0.0;
        value += 0.5 * s.dt * mu[i] * st.a_mu[i] + conj - s.mass[i] * s.phi_prev[i] * mu[i];
    }
    st.value = value;
}

}  // namespace

LocalSolution solve_dual_newton(const StepData& s, std::span<const double> mu0, const SolverOptions& options) {
    const std::size_t n = s.size();
    std::vector<double> mu(mu0.begin(), mu0.end());
    DualState st;
    evaluate(s, mu, st);

    std::vector<double> grad(n), hdiag(n), inv_diag(n), step(n), trial(n);
    std::vector<char> comp_free(s.num_components);
    DualState trial_state;

    LocalSolution out;
    double last_update = 0.0;
    for (std::size_t it = 0;; ++it) {
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = s.dt * st.a_mu[i] + s.mass[i] * (st.phi[i] - s.phi_prev[i]);
            residual = std::max(residual, std::abs(grad[i]) / s.mass[i]);
        }
        if (!std::isfinite(residual)) {
            throw SolverError("dual Newton produced a non-finite residual", st.phi, residual);
        }
        const bool converged =
            residual <= options.residual_tol && (it == 0 || last_update <= options.tol);
        if (converged) {
            out.residual = residual;
            out.iterations = it;
            break;
        }
        if (it >= options.max_iters) {
            throw SolverError("dual Newton did not converge in " + std::to_string(it) +
                                  " iterations (residual " + std::to_string(residual) + ")",
                              st.phi, residual);
        }

        // Generalised Hessian dt a + diag(m^2 / e''(phi)) on free nodes. A
        // component without free nodes keeps e''(0) so the system stays
        // definite on its constants.
        std::fill(comp_free.begin(), comp_free.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (st.phi[i] > 0.0) comp_free[static_cast<std::size_t>(s.component[i])] = 1;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const bool free_node = st.phi[i] > 0.0;
            const bool fallback = !comp_free[static_cast<std::size_t>(s.component[i])];
            double w = 0.0;
            if (free_node || fallback) {
                w = s.mass[i] * s.mass[i] / s.energy.curvature(st.phi[i], s.mass[i], s.d[i]);
            }
            hdiag[i] = w;
            inv_diag[i] = 1.0 / (s.dt * s.a_diag[i] + w);
            trial[i] = -grad[i];
        }

        std::fill(step.begin(), step.end(), 0.0);
        CgOptions cg;
        cg.rel_tol = options.inner_tol;
        cg.max_iters = 20 * n + 100;
        const CgResult res = conjugate_gradient(
            [&](std::span<const double> in, std::span<double> o) {
                kernels::spmv(s.a, in, o);
                for (std::size_t i = 0; i < n; ++i) o[i] = s.dt * o[i] + hdiag[i] * in[i];
            },
            inv_diag, trial, step, cg);
        out.inner_iterations += res.iterations;
        if (!res.converged) {
            throw SolverError("dual Newton linear solve did not converge (relative residual " +
                                  std::to_string(res.rel_residual) + ")",
                              st.phi, residual);
        }

        const double slope = kernels::dot(grad, step);
        const double slack = 1e-13 * (std::abs(st.value) + 1.0);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = mu[i] + t * step[i];
            evaluate(s, trial, trial_state);
            if (trial_state.value <= st.value + 1e-4 * t * slope + slack) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            throw SolverError("dual Newton line search failed (residual " + std::to_string(residual) + ")",
                              st.phi, residual);
        }

        last_update = 0.0;
        for (std::size_t i = 0; i < n; ++i) last_update = std::max(last_update, std::abs(trial_state.phi[i] - st.phi[i]));
        mu.swap(trial);
        std::swap(st, trial_state);
    }

    out.phi = st.phi;
    out.eta.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (out.phi[i] <= 0.0) out.eta[i] = s.energy.slope(0.0, s.mass[i], s.d[i], s.c[i]) - s.mass[i] * mu[i];
    }
    out.mu = std::move(mu);
    out.last_update = last_update;
    return out;
}

}  // namespace nlch::detail
