#pragma once

// Dense reference solver for one step on small meshes. Independent of the
// iterative solvers: explicit pseudo-inverse, zero-set enumeration and a
// constrained Newton method on the free nodes.

#include <cstddef>
#include <vector>

#include "nlch/mesh.hpp"
#include "nlch/nonlocal.hpp"
#include "nlch/potential.hpp"
#include "nlch/solver.hpp"

namespace nlch::oracle {

struct OracleResult {
    NodalField phi;
    NodalField mu;
    NodalField eta;
    std::vector<std::size_t> zero_set;  // global indices of active nodes with phi = 0
    std::size_t sets_tried = 0;
};

/// Dense Moore-Penrose inverse of the active block of ops.ahat, via
/// (A + U U^T)^-1 - U U^T with U the normalised component indicators.
/// Returned in full size with an identity block on passive nodes.
std::vector<std::vector<double>> dense_pinv(const StepOperators& ops);

/// Explicit dense Q = eps diag(J1) + (1/dt) Mhat ahat^+ Mhat.
std::vector<std::vector<double>> dense_Q(const StepOperators& ops, const KernelMatrices& km, double dt,
                                         double eps);

/// Solves the unregularised step. Throws std::runtime_error when no zero set
/// yields a consistent solution.
OracleResult dense_oracle_solve(const NodalField& phi_prev, const StepOperators& ops, const KernelMatrices& km,
                                const Mesh& mesh, const PotentialParams& pot, double dt);

}  // namespace nlch::oracle
