#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "nlch/errors.hpp"
#include "nlch/kernels.hpp"
#include "nlch/solver.hpp"
#include "oracle/instances.hpp"

using namespace nlch;

namespace {

double max_diff(const NodalField& a, const NodalField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

struct Setup {
    NodePartition part;
    StepOperators ops;
};

Setup setup(const testing::Instance& ins) {
    Setup s;
    s.part = classify_nodes(ins.phi_prev, ins.mesh, ins.mob);
    s.ops = build_step_operators(ins.phi_prev, s.part, ins.mesh, ins.mob);
    return s;
}

}  // namespace

TEST_CASE("node classification") {
    const Mesh m = build_uniform_mesh({0.0, 1.0, 0.0, 1.0}, 6, 6);
    SUBCASE("all zero: every node passive") {
        const NodePartition p = classify_nodes(NodalField(m.num_nodes(), 0.0), m);
        CHECK(p.passive.size() == m.num_nodes());
        CHECK(p.components.empty());
    }
    SUBCASE("all positive: one component") {
        const NodePartition p = classify_nodes(NodalField(m.num_nodes(), 0.3), m);
        CHECK(p.passive.empty());
        CHECK(p.components.size() == 1);
    }
    SUBCASE("two blobs separated by a zero band are two components") {
        NodalField phi(m.num_nodes(), 0.0);
        for (std::size_t iy = 0; iy <= 6; ++iy) {
            phi[m.node_index(0, iy)] = 0.4;
            phi[m.node_index(6, iy)] = 0.4;
        }
        const NodePartition p = classify_nodes(phi, m);
        CHECK(p.components.size() == 2);
        // Columns 0-1 and 5-6 are active, 2-4 passive.
        CHECK(p.num_active() == 4 * 7);
        CHECK(p.is_passive(m.node_index(3, 3)));
        CHECK_FALSE(p.is_passive(m.node_index(1, 3)));
        const NodalField mask = p.component_mask(0);
        CHECK(std::count(mask.begin(), mask.end(), 1.0) == 14);
        // With alpha = 0 the mobility never vanishes, so the active nodes
        // are still separated only by passive ones.
        CHECK(classify_nodes(phi, m, {0.0, 1.0}).components.size() == 2);
    }
    CHECK_THROWS_AS(classify_nodes(NodalField(m.num_nodes(), -0.1), m), std::invalid_argument);
}

TEST_CASE("step operators: identity on passive rows, symmetric, null vector per component") {
    const auto ins = testing::make_instance(3, 4, 1.0, true);
    const Setup s = setup(ins);
    REQUIRE_FALSE(s.part.passive.empty());
    CHECK(is_symmetric(s.ops.ahat, 1e-14));
    for (std::size_t j : s.part.passive) {
        CHECK(s.ops.ahat.at(j, j) == 1.0);
        CHECK(s.ops.mhat[j] == 1.0);
        for (std::size_t k = s.ops.ahat.row_ptr[j]; k < s.ops.ahat.row_ptr[j + 1]; ++k) {
            if (s.ops.ahat.col[k] != j) CHECK(s.ops.ahat.val[k] == 0.0);
        }
    }
    for (std::size_t c = 0; c < s.part.components.size(); ++c) {
        const NodalField mask = s.part.component_mask(c);
        NodalField out(mask.size());
        kernels::spmv(s.ops.ahat, mask, out);
        CHECK(kernels::max_abs(out) < 1e-14);
    }
}

TEST_CASE("pseudo-inverse solve reproduces consistent right-hand sides") {
    const auto ins = testing::make_instance(8, 4, 2.0, true);
    const Setup s = setup(ins);
    NodalField rhs(ins.mesh.num_nodes());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::cos(0.7 * static_cast<double>(i));
    s.ops.project_range(rhs);
    const NodalField x = s.ops.solve_ahat(rhs, 1e-13);
    NodalField back(rhs.size());
    kernels::spmv(s.ops.ahat, x, back);
    CHECK(max_diff(back, rhs) < 1e-10);
}

TEST_CASE("Q is symmetric") {
    const auto ins = testing::make_instance(4, 4, 1.0, true);
    const Setup s = setup(ins);
    NodalField v(ins.mesh.num_nodes()), w(ins.mesh.num_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::sin(static_cast<double>(i));
        w[i] = std::cos(2.0 * static_cast<double>(i));
    }
    const NodalField qv = apply_Q(v, s.ops, ins.km, ins.dt, ins.pot.epsilon);
    const NodalField qw = apply_Q(w, s.ops, ins.km, ins.dt, ins.pot.epsilon);
    CHECK(kernels::dot(w, qv) == doctest::Approx(kernels::dot(v, qw)).epsilon(1e-9));
}

TEST_CASE("unchanged phi gives zero recovered mu") {
    const auto ins = testing::make_instance(1, 3, 1.0, false);
    const Setup s = setup(ins);
    const NodalField mu = recover_mu(ins.phi_prev, ins.phi_prev, s.ops, ins.dt);
    CHECK(kernels::max_abs(mu) == 0.0);
}

TEST_CASE("uniform state is a fixed point with mu = psi'(c) / eps") {
    auto ins = testing::make_instance(1, 5, 1.0, false);
    std::fill(ins.phi_prev.begin(), ins.phi_prev.end(), 0.3);
    const Setup s = setup(ins);
    const StepResult r = solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
    CHECK(max_diff(r.phi_new, ins.phi_prev) < 1e-13);
    const double expected = (psi1_prime(0.3, ins.pot) + psi2_prime(0.3, ins.pot)) / ins.pot.epsilon;
    for (double mu : r.mu_new) CHECK(mu == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("all-passive state is returned unchanged with zero mu") {
    auto ins = testing::make_instance(1, 3, 1.0, false);
    std::fill(ins.phi_prev.begin(), ins.phi_prev.end(), 0.0);
    const Setup s = setup(ins);
    const StepResult r = solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
    CHECK(kernels::max_abs(r.phi_new) == 0.0);
    CHECK(kernels::max_abs(r.mu_new) == 0.0);
    CHECK(r.iterations == 0);
}

TEST_CASE("Newton and projected gradient reach the same step solution") {
    for (std::uint64_t seed : {2u, 7u}) {
        const auto ins = testing::make_instance(seed, 4, 1.0, true, 1e-3, 0.3);
        const Setup s = setup(ins);
        SolverOptions pg;
        pg.method = SolverMethod::projected_gradient;
        pg.tol = 1e-13;
        pg.inner_tol = 1e-13;
        const StepResult a = solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
        const StepResult b = solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt, pg);
        CHECK(max_diff(a.phi_new, b.phi_new) < 1e-9);
        CHECK(b.iterations > a.iterations);
    }
}

TEST_CASE("step conserves component mass, respects bounds and complementarity") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto ins = testing::make_instance(seed, 5, seed % 2 ? 2.0 : 1.0, true, 1e-3, 0.3);
        const Setup s = setup(ins);
        const StepResult r = solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
        for (std::size_t c = 0; c < s.part.components.size(); ++c) {
            double before = 0.0, after = 0.0;
            for (std::size_t j : s.part.components[c]) {
                before += ins.mesh.lumped_mass[j] * ins.phi_prev[j];
                after += ins.mesh.lumped_mass[j] * r.phi_new[j];
            }
            CHECK(after == doctest::Approx(before).epsilon(1e-12));
        }
        for (std::size_t j : s.part.passive) CHECK(r.phi_new[j] == ins.phi_prev[j]);
        for (double v : r.phi_new) {
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
        }
        const auto rep = complementarity_residual(ins.phi_prev, r.phi_new, r.eta, s.ops, ins.km, ins.mesh, ins.pot, ins.dt);
        CHECK(rep.max() < 1e-10);
    }
}

TEST_CASE("warm start does not change the solution") {
    const auto ins = testing::make_instance(12, 4, 1.0, true, 1e-3, 0.3);
    const Setup s = setup(ins);
    const StepResult cold = solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
    const StepResult warm = solve_vi_step(ins.phi_prev, cold.mu_new, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
    CHECK(max_diff(cold.phi_new, warm.phi_new) < 1e-12);
    CHECK(warm.iterations <= 1);
}

TEST_CASE("regularised step approaches the constrained step") {
    const auto ins = testing::make_instance(6, 4, 1.0, false, 1e-3);
    const Setup s = setup(ins);
    const StepResult vi = solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
    const StepResult reg = solve_regularized_step(ins.phi_prev, {}, 1e-6, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt);
    CHECK(max_diff(vi.phi_new, reg.phi_new) < 1e-8);
    CHECK_THROWS_AS(solve_regularized_step(ins.phi_prev, {}, 0.0, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt),
                    std::invalid_argument);
}

TEST_CASE("iteration cap raises SolverError with the last iterate") {
    const auto ins = testing::make_instance(9, 4, 1.0, true, 1e-3, 0.3);
    const Setup s = setup(ins);
    SolverOptions opt;
    opt.max_iters = 1;
    try {
        solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt, opt);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK_FALSE(e.last_iterate().empty());
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("invalid inputs are rejected") {
    auto ins = testing::make_instance(1, 3, 1.0, false);
    const Setup s = setup(ins);
    CHECK_THROWS_AS(solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, -1.0), std::invalid_argument);
    ins.phi_prev[0] = 1.0;
    CHECK_THROWS_AS(solve_vi_step(ins.phi_prev, {}, s.ops, ins.km, ins.mesh, ins.pot, ins.mob, ins.dt), std::invalid_argument);
}

TEST_CASE("discrete Green operator") {
    const Mesh m = build_uniform_mesh({}, 12, 12);
    NodalField v(m.num_nodes());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::cos(M_PI * m.nodes[j].x / 2.0 + M_PI / 2.0);
    double mean = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) mean += m.lumped_mass[j] * v[j];
    for (double& x : v) x -= mean / 4.0;
    const NodalField g = discrete_green_apply(v, m);
    // (grad g, grad chi) = (v, chi)^h for every basis function chi.
    const CsrMatrix a = assemble_stiffness(m, std::vector<double>(m.num_elements(), 1.0));
    NodalField ag(g.size());
    kernels::spmv(a, g, ag);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(ag[j] == doctest::Approx(m.lumped_mass[j] * v[j]).epsilon(1e-8).scale(1e-3));
    CHECK(std::abs(lumped_inner_product(g, NodalField(g.size(), 1.0), m)) < 1e-12);
    CHECK_THROWS_AS(discrete_green_apply(NodalField(m.num_nodes(), 1.0), m), std::invalid_argument);
}
