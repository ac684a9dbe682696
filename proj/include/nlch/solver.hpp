#pragma once

// One implicit step of the variational-inequality scheme for the non-local
// degenerate Cahn-Hilliard equation.
//
// Given phi_prev >= 0, the step finds phi >= 0 and mu with
//
//   M (phi - phi_prev) / dt + A mu = 0
//   (psi1'(phi) + psi2'(phi_prev)) / eps + eps (J*1)_h phi - eps (J*phi_prev)_h - mu  >= 0,
//   with equality wherever phi > 0,
//
// where A is the stiffness matrix weighted by b(phi_prev). Nodes whose whole
// basis support carries phi_prev = 0 are passive and frozen; the remaining
// active nodes split into components that each conserve their lumped mass.

#include <cstddef>
#include <span>
#include <vector>

#include "nlch/mesh.hpp"
#include "nlch/nonlocal.hpp"
#include "nlch/potential.hpp"
#include "nlch/sparse.hpp"

namespace nlch {

struct NodePartition {
    std::vector<int> component_of;  // -1 on passive nodes
    std::vector<std::size_t> passive;
    std::vector<std::vector<std::size_t>> components;

    bool is_passive(std::size_t j) const { return component_of[j] < 0; }
    std::size_t num_active() const { return component_of.size() - passive.size(); }
    /// Nodal indicator Sigma_m of component m.
    NodalField component_mask(std::size_t m) const;
};

/// Passive nodes are those whose basis-support patch carries zero phi_prev.
/// Two active nodes belong to the same component when they share an element
/// on which the mobility does not vanish: for alpha > 0 that is an element
/// where phi_prev is not identically zero, for alpha = 0 any element.
NodePartition classify_nodes(std::span<const double> phi_prev, const Mesh& mesh,
                             const MobilityParams& mob = {});

/// Per-step operators with passive rows and columns replaced by the identity.
struct StepOperators {
    NodePartition partition;
    CsrMatrix ahat;                    // modified mobility stiffness
    std::vector<double> mhat;          // modified lumped mass (diagonal)
    std::vector<double> element_coeff; // b(mean of phi_prev) per element
    std::size_t floored_elements = 0;  // active elements lifted to the 1e-14 floor

    /// Orthogonal projection onto the range of ahat: removes the Euclidean
    /// mean of v on every active component.
    void project_range(std::span<double> v) const;

    /// Moore-Penrose solve x = ahat^+ rhs. Identity on passive rows; on each
    /// active component the constant null vector is projected out of both
    /// rhs and x.
    NodalField solve_ahat(std::span<const double> rhs, double rel_tol = 1e-10) const;
};

StepOperators build_step_operators(std::span<const double> phi_prev, const NodePartition& part,
                                   const Mesh& mesh, const MobilityParams& mob);

/// Q v = eps J1 v + (1/dt) Mhat ahat^+ Mhat v.
NodalField apply_Q(std::span<const double> v, const StepOperators& ops, const KernelMatrices& km,
                   double dt, double eps);

/// mu = -(1/dt) ahat^+ Mhat (phi_new - phi_prev): the chemical potential up to
/// one additive constant per active component. Zero on passive nodes.
NodalField recover_mu(std::span<const double> phi_new, std::span<const double> phi_prev,
                      const StepOperators& ops, double dt);

enum class SolverMethod {
    newton,             // semismooth Newton on the dual (mu) problem
    projected_gradient  // preconditioned projected gradient on phi
};

struct SolverOptions {
    SolverMethod method = SolverMethod::newton;
    double tol = 1e-6;            // max-norm change of phi between iterates
    std::size_t max_iters = 20000;
    double initial_step = 1.0;    // first acceleration parameter (projected gradient)
    double inner_tol = 1e-10;     // relative residual of inner SPD solves
    double residual_tol = 1e-11;  // Newton: mass-balance residual, in units of phi
};

struct StepResult {
    NodalField phi_new;
    NodalField mu_new;  // zero (and non-unique) on passive nodes
    NodalField eta;     // multipliers of phi >= 0, zero on passive nodes
    std::size_t iterations = 0;
    std::size_t inner_iterations = 0;
    double residual = 0.0;  // final convergence measure of the chosen method
    double last_update = 0.0;
    std::size_t floored_elements = 0;
};

/// Solves one step of the unregularised scheme. Warm-started from
/// (phi_prev, mu_prev); mu_prev may be empty.
StepResult solve_vi_step(std::span<const double> phi_prev, std::span<const double> mu_prev,
                         const StepOperators& ops, const KernelMatrices& km, const Mesh& mesh,
                         const PotentialParams& pot, const MobilityParams& mob, double dt,
                         const SolverOptions& options = {});

/// Same step with psi1 replaced by its lambda-regularisation (and psi2 by
/// its C^2 extension). phi_new may exceed 1 here.
StepResult solve_regularized_step(std::span<const double> phi_prev, std::span<const double> mu_prev,
                                  double lambda, const StepOperators& ops, const KernelMatrices& km,
                                  const Mesh& mesh, const PotentialParams& pot,
                                  const MobilityParams& mob, double dt,
                                  const SolverOptions& options = {});

struct ComplementarityReport {
    double stationarity = 0.0;     // scaled max |Q phi + ... - gamma M Sigma - eta| on active nodes
    double sign = 0.0;             // max violation of phi >= 0 and eta >= 0
    double complementarity = 0.0;  // scaled max |eta_j phi_j|
    double mass = 0.0;             // max relative per-component mass defect
    double max() const;
};

/// Residual of the reduced complementarity system evaluated at (phi_new, eta).
/// The component constants are the least-squares fit over nodes with
/// phi > 0.
ComplementarityReport complementarity_residual(std::span<const double> phi_prev,
                                               std::span<const double> phi_new,
                                               std::span<const double> eta,
                                               const StepOperators& ops, const KernelMatrices& km,
                                               const Mesh& mesh, const PotentialParams& pot,
                                               double dt);

/// Discrete Green operator with constant unit coefficient: the zero-mean G
/// with (grad G, grad chi) = (v, chi)^h. v must have zero lumped mean.
NodalField discrete_green_apply(std::span<const double> v, const Mesh& mesh);

}  // namespace nlch
