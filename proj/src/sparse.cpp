#include "nlch/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlch/kernels.hpp"

namespace nlch {

std::size_t CsrMatrix::find(std::size_t i, std::size_t j) const {
    auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return npos;
    return static_cast<std::size_t>(it - col.begin());
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    const std::size_t k = find(i, j);
    return k == npos ? 0.0 : val[k];
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) d[i] = at(i, i);
    return d;
}

CsrMatrix make_pattern(std::size_t rows, std::size_t cols,
                       const std::vector<std::vector<std::size_t>>& columns) {
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    std::vector<std::size_t> scratch;
    for (std::size_t i = 0; i < rows; ++i) {
        scratch = columns[i];
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        m.col.insert(m.col.end(), scratch.begin(), scratch.end());
        m.row_ptr[i + 1] = m.col.size();
    }
    m.val.assign(m.col.size(), 0.0);
    return m;
}

bool is_symmetric(const CsrMatrix& a, double rel_tol) {
    if (a.rows != a.cols) return false;
    double scale = 0.0;
    for (double v : a.val) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            if (std::abs(a.val[k] - a.at(a.col[k], i)) > rel_tol * scale) return false;
        }
    }
    return true;
}

CgResult conjugate_gradient(const LinearMap& apply, std::span<const double> inv_diag,
                            std::span<const double> rhs, std::span<double> x,
                            const CgOptions& options,
                            const std::function<void(std::span<double>)>& project) {
    namespace k = kernels;
    const std::size_t n = rhs.size();
    CgResult result;

    std::vector<double> b(rhs.begin(), rhs.end());
    if (project) project(b);
    const double bnorm = std::sqrt(k::dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        result.converged = true;
        return result;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    if (project) project(r);

    auto precondition = [&] {
        k::hadamard(inv_diag, r, z);
        if (project) project(z);
    };

    precondition();
    p = z;
    double rz = k::dot(r, z);
    double rnorm = std::sqrt(k::dot(r, r));
    result.rel_residual = rnorm / bnorm;

    while (result.rel_residual > options.rel_tol && result.iterations < options.max_iters) {
        apply(p, q);
        const double pq = k::dot(p, q);
        if (!(pq > 0.0)) break;
        const double step = rz / pq;
        k::axpy(step, p, x);
        k::axpy(-step, q, r);
        precondition();
        const double rz_next = k::dot(r, z);
        k::xpby(z, rz_next / rz, p);
        rz = rz_next;
        rnorm = std::sqrt(k::dot(r, r));
        result.rel_residual = rnorm / bnorm;
        ++result.iterations;
    }
    if (project) project(x);
    result.converged = result.rel_residual <= options.rel_tol;
    return result;
}

}  // namespace nlch
