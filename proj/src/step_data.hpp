#pragma once

// Active-node view of one implicit step, shared by the step solvers.

#include <cstddef>
#include <span>
#include <vector>

#include "nlch/pointwise.hpp"
#include "nlch/solver.hpp"

namespace nlch::detail {

struct StepData {
    explicit StepData(const PointwiseEnergy& e) : energy(e) {}

    PointwiseEnergy energy;
    double dt = 0.0;
    double eps = 0.0;

    std::vector<std::size_t> active;     // local -> global node index
    std::vector<int> component;          // per local node
    std::size_t num_components = 0;

    std::vector<double> mass;            // lumped mass m_i
    std::vector<double> d;               // eps J1_i
    std::vector<double> c;               // (m/eps) psi2'(phi_prev) - eps (J2 phi_prev)_i
    std::vector<double> phi_prev;

    CsrMatrix a;                         // ahat restricted to the active nodes
    std::vector<double> a_diag;

    std::size_t size() const noexcept { return active.size(); }
};

StepData make_step_data(std::span<const double> phi_prev, const StepOperators& ops,
                        const KernelMatrices& km, const Mesh& mesh, const PotentialParams& pot,
                        double dt, double lambda);

/// Removes the Euclidean mean of v on every component (local indexing).
void project_components(const StepData& s, std::span<double> v);

/// w = a^+ rhs on the active block; returns inner CG iterations.
std::size_t solve_active_pinv(const StepData& s, std::span<const double> rhs, std::span<double> w,
                              double rel_tol);

struct LocalSolution {
    std::vector<double> phi;
    std::vector<double> mu;
    std::vector<double> eta;
    std::size_t iterations = 0;
    std::size_t inner_iterations = 0;
    double residual = 0.0;
    double last_update = 0.0;
};

LocalSolution solve_dual_newton(const StepData& s, std::span<const double> mu0, const SolverOptions& options);
LocalSolution solve_projected_gradient(const StepData& s, const SolverOptions& options);

}  // namespace nlch::detail
