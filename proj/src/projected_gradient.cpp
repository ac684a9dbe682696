#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"
#include "step_data.hpp"

namespace nlch::detail {

namespace {

constexpr double kArmijo = 1e-4;

struct PrimalState {
    std::vector<double> phi;
    std::vector<double> w;     // a^+ M (phi - phi_prev)
    std::vector<double> grad;  // e'(phi) + M w / dt
    double value = 0.0;
    bool finite = false;
};

// E(phi) = sum_i e_i(phi_i) + (1 / 2dt) (phi - phi_prev)^T M a^+ M (phi - phi_prev).
std::size_t evaluate(const StepData& s, PrimalState& st, double inner_tol) {
    const std::size_t n = s.size();
    st.finite = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.energy.regularized() && st.phi[i] >= 1.0) {
            st.finite = false;
            return 0;
        }
    }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = s.mass[i] * (st.phi[i] - s.phi_prev[i]);
    st.w.resize(n);
    const std::size_t inner = solve_active_pinv(s, rhs, st.w, inner_tol);
    st.grad.resize(n);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        value += s.energy.value(st.phi[i], s.mass[i], s.d[i], s.c[i]) + 0.5 * rhs[i] * st.w[i] / s.dt;
        st.grad[i] = s.energy.slope(st.phi[i], s.mass[i], s.d[i], s.c[i]) + s.mass[i] * st.w[i] / s.dt;
    }
    st.value = value;
    return inner;
}

// P-metric projection of y onto {x >= 0, sum_{i in comp} m_i x_i = target}:
// x_i = max(0, y_i + nu m_i / P_i), with nu found by sweeping the sorted
// breakpoints b_i = -y_i P_i / m_i.
void project(const StepData& s, const std::vector<std::vector<std::size_t>>& comps,
             std::span<const double> target, std::span<const double> p, std::span<const double> y,
             std::span<double> x) {
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto& idx = comps[c];
        std::vector<std::pair<double, std::size_t>> bp;
        bp.reserve(idx.size());
        for (std::size_t i : idx) bp.emplace_back(-y[i] * p[i] / s.mass[i], i);
        std::sort(bp.begin(), bp.end());

        // Mass for nu in (bp[k-1], bp[k]]: sum over the first k nodes of
        // m_i y_i + nu m_i^2 / P_i.
        double base = 0.0, rate = 0.0, nu = 0.0;
        bool found = false;
        for (std::size_t k = 0; k < bp.size(); ++k) {
            const std::size_t i = bp[k].second;
            base += s.mass[i] * y[i];
            rate += s.mass[i] * s.mass[i] / p[i];
            const double upper = k + 1 < bp.size() ? bp[k + 1].first : std::numeric_limits<double>::infinity();
            nu = (target[c] - base) / rate;
            if (nu <= upper) {
                found = true;
                break;
            }
        }
        if (!found) nu = (target[c] - base) / rate;
        for (std::size_t i : idx) x[i] = std::max(0.0, y[i] + nu * s.mass[i] / p[i]);
    }
}

}  // namespace

LocalSolution solve_projected_gradient(const StepData& s, const SolverOptions& options) {
    const std::size_t n = s.size();
    std::vector<std::vector<std::size_t>> comps(s.num_components);
    std::vector<double> target(s.num_components, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(s.component[i]);
        comps[c].push_back(i);
        target[c] += s.mass[i] * s.phi_prev[i];
    }

    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = s.d[i] + s.mass[i] * s.mass[i] / (s.dt * s.a_diag[i]);

    LocalSolution out;
    PrimalState cur, trial;
    cur.phi = s.phi_prev;
    out.inner_iterations += evaluate(s, cur, options.inner_tol);
    if (!cur.finite) throw SolverError("projected gradient: initial state outside the domain", cur.phi);

    std::vector<double> y(n);
    double tau = options.initial_step;
    double last_update = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    for (; it < options.max_iters; ++it) {
        double step_tau = tau;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) y[i] = cur.phi[i] - step_tau * cur.grad[i] / p[i];
            trial.phi.resize(n);
            project(s, comps, target, p, y, trial.phi);
            out.inner_iterations += evaluate(s, trial, options.inner_tol);
            if (trial.finite) {
                double decrease = 0.0;
                for (std::size_t i = 0; i < n; ++i) decrease += cur.grad[i] * (trial.phi[i] - cur.phi[i]);
                const double slack = 1e-13 * (std::abs(cur.value) + 1.0);
                if (trial.value <= cur.value + kArmijo * decrease + slack) {
                    accepted = true;
                    break;
                }
            }
            step_tau *= 0.5;
        }
        if (!accepted) {
            throw SolverError("projected gradient line search failed at iteration " + std::to_string(it),
                              cur.phi, last_update);
        }

        // Barzilai-Borwein step in the P metric.
        double sps = 0.0, sy = 0.0;
        last_update = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ds = trial.phi[i] - cur.phi[i];
            sps += ds * p[i] * ds;
            sy += ds * (trial.grad[i] - cur.grad[i]);
            last_update = std::max(last_update, std::abs(ds));
        }
        tau = (sy > 0.0 && sps > 0.0) ? sps / sy : options.initial_step;
        std::swap(cur, trial);
        if (last_update <= options.tol) {
            ++it;
            break;
        }
    }
    if (last_update > options.tol) {
        throw SolverError("projected gradient did not converge in " + std::to_string(it) + " iterations",
                          cur.phi, last_update);
    }

    // mu = mu_tilde + gamma per component, with mu_tilde = -w / dt and gamma
    // fitted on the nodes where phi > 0.
    std::vector<double> num(s.num_components, 0.0), den(s.num_components, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (cur.phi[i] > 0.0) {
            num[static_cast<std::size_t>(s.component[i])] += cur.grad[i];
            den[static_cast<std::size_t>(s.component[i])] += s.mass[i];
        }
    }
    out.phi = cur.phi;
    out.mu.resize(n);
    out.eta.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(s.component[i]);
        const double gamma = den[c] > 0.0 ? num[c] / den[c] : 0.0;
        out.mu[i] = -cur.w[i] / s.dt + gamma;
        if (cur.phi[i] <= 0.0) out.eta[i] = cur.grad[i] - gamma * s.mass[i];
    }
    out.iterations = it;
    out.residual = last_update;
    out.last_update = last_update;
    return out;
}

}  // namespace nlch::detail
