#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlch {

/// Compressed row storage with sorted column indices per row.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;  // size rows + 1
    std::vector<std::size_t> col;
    std::vector<double> val;

    std::size_t nnz() const noexcept { return val.size(); }

    /// Entry (i, j), zero when not stored. Binary search in row i.
    double at(std::size_t i, std::size_t j) const;

    /// Position of (i, j) in `val`, or npos.
    std::size_t find(std::size_t i, std::size_t j) const;

    std::vector<double> diagonal() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Builds a CSR pattern (values zeroed) from per-row column lists. Columns are
/// sorted and deduplicated.
CsrMatrix make_pattern(std::size_t rows, std::size_t cols,
                       const std::vector<std::vector<std::size_t>>& columns);

bool is_symmetric(const CsrMatrix& a, double rel_tol);

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct CgOptions {
    double rel_tol = 1e-10;
    std::size_t max_iters = 10000;
};

struct CgResult {
    std::size_t iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// (semi)definite operator. `project`, when set, is applied to the right-hand
/// side, to every preconditioned residual and to the final iterate; it must be
/// an orthogonal projector onto the range of the operator, which makes the
/// iteration well defined on consistent singular systems.
CgResult conjugate_gradient(const LinearMap& apply, std::span<const double> inv_diag,
                            std::span<const double> rhs, std::span<double> x,
                            const CgOptions& options,
                            const std::function<void(std::span<double>)>& project = {});

}  // namespace nlch
