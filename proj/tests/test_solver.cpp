#include <doctest.h>

#include <cmath>
#include <random>

#include "porofem/assembly.hpp"
#include "porofem/fe_tables.hpp"
#include "porofem/manufactured.hpp"
#include "porofem/norms.hpp"
#include "porofem/solver.hpp"

using namespace porofem;

namespace {

/// Homogeneous all-Dirichlet setup with no forcing on a small unit-square
/// mesh (zero-mean pressure gauge).
ProblemSetup homogeneous_setup(int level, double dt, int n_steps,
                               ViscousForm form = ViscousForm::grad_grad) {
    const TimeVectorField zero = [](double, const Eigen::Vector2d&) {
        return Eigen::Vector2d::Zero().eval();
    };
    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> bc;
    for (int tag = 0; tag < kNumBoundaryTags; ++tag)
        bc[tag] = zero;
    return make_problem_setup(build_unit_square_mesh(level), bc, bc, {}, {}, form,
                              PressureGauge::zero_mean, dt, n_steps);
}

Eigen::MatrixXd block(const SparseMatrix& A, int row0, int rows, int col0, int cols) {
    return Eigen::MatrixXd(A.block(row0, col0, rows, cols));
}

} // namespace

TEST_CASE("interpolate_initial: zero fields, sine start, exact node values") {
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 1);
    const SystemState zero_state = interpolate_initial(setup, {}, {});
    CHECK(zero_state.u.norm() == 0.0);
    CHECK(zero_state.v.norm() == 0.0);
    CHECK(zero_state.p.norm() == 0.0);

    // theta2 vanishes at t=0, so the manufactured initial state is zero
    const ManufacturedCase sine = make_manufactured_case(ThetaKind::sine);
    const ProblemSetup msetup = make_manufactured_setup(sine, 2, 4);
    const SystemState sine_state = manufactured_initial(sine, msetup);
    CHECK(sine_state.u.norm() == 0.0);
    CHECK(sine_state.v.norm() == 0.0);

    // theta1 initial velocity carries (1,0) at the node (0.25, 0)
    const ManufacturedCase expc = make_manufactured_case(ThetaKind::exp_decay);
    const ProblemSetup esetup = make_manufactured_setup(expc, 4, 10);
    const SystemState estate = manufactured_initial(expc, esetup);
    CHECK(estate.v[2 * 8] == doctest::Approx(1.0));
    CHECK(estate.v[2 * 8 + 1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("zero data yields the zero solution in one step") {
    const ProblemSetup setup = homogeneous_setup(2, 0.05, 1);
    const MaterialParams params = manufactured_params();
    const SystemState zero_state = interpolate_initial(setup, {}, {});

    const auto [A, b] = assemble_step(zero_state, setup, params, setup.dt);
    CHECK(b.norm() == 0.0);
    DirectSolver solver;
    const SystemState next = solve_step(solver, A, b, setup, 1, setup.dt);
    CHECK(next.u.norm() < 1e-12);
    CHECK(next.v.norm() < 1e-12);
    CHECK(next.p.norm() < 1e-12);
}

TEST_CASE("zero-data uniqueness over random admissible nonlinearities") {
    std::mt19937 rng(314);
    std::uniform_real_distribution<double> lambda_dist(-1.2, 1.2);
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 1);
    const SystemState zero_state = interpolate_initial(setup, {}, {});

    int tested = 0;
    while (tested < 20) {
        MaterialParams params = manufactured_params();
        params.lambda1 = lambda_dist(rng);
        params.lambda2 = lambda_dist(rng);
        if (!gamma_constants(params).admissible)
            continue;
        ++tested;
        const auto [A, b] = assemble_step(zero_state, setup, params, setup.dt);
        DirectSolver solver;
        const SystemState next = solve_step(solver, A, b, setup, 1, setup.dt);
        CHECK(next.u.lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK(next.v.lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK(next.p.lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("assembled blocks: symmetry and the skew divergence pairing") {
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 1);
    const MaterialParams params = manufactured_params();

    // random previous displacement activates the nonlinear coefficients
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amp(-0.01, 0.01);
    SystemState prev = interpolate_initial(setup, {}, {});
    for (int i = 0; i < prev.u.size(); ++i)
        prev.u[i] = amp(rng);

    const auto [A, b] = assemble_step(prev, setup, params, setup.dt);
    const int nu = setup.n_dofs_u();
    const int nv = setup.n_dofs_v();
    const int np = setup.n_dofs_p();

    const Eigen::MatrixXd a_uu = block(A, 0, nu, 0, nu);
    const Eigen::MatrixXd a_vv = block(A, nu, nv, nu, nv);
    CHECK((a_uu - a_uu.transpose()).norm() < 1e-12 * a_uu.norm());
    CHECK((a_vv - a_vv.transpose()).norm() < 1e-12 * a_vv.norm());

    // -B^T in the fluid rows against +B in the continuity rows
    const Eigen::MatrixXd b_vp = block(A, nu, nv, nu + nv, np);
    const Eigen::MatrixXd b_pv = block(A, nu + nv, np, nu, nv);
    CHECK((b_vp + b_pv.transpose()).norm() < 1e-12 * std::max(1.0, b_pv.norm()));

    // coupling masses: -alpha M against -(alpha/dt) M
    const Eigen::MatrixXd m_uv = block(A, 0, nu, nu, nv);
    const Eigen::MatrixXd m_vu = block(A, nu, nv, 0, nu);
    CHECK((m_uv / params.alpha - m_vu.transpose() * setup.dt / params.alpha).norm() <
          1e-12 * std::max(1.0, m_uv.norm()));
}

TEST_CASE("coefficient freezing degenerates to a constant operator when lambda = 0") {
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 1);
    MaterialParams params = manufactured_params();
    params.lambda1 = params.lambda2 = 0.0;

    SystemState zero_prev = interpolate_initial(setup, {}, {});
    SystemState random_prev = zero_prev;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> amp(-0.02, 0.02);
    for (int i = 0; i < random_prev.u.size(); ++i)
        random_prev.u[i] = amp(rng);

    const auto [a0, b0] = assemble_step(zero_prev, setup, params, setup.dt);
    const auto [a1, b1] = assemble_step(random_prev, setup, params, setup.dt);
    // identical pattern and (up to the mass rhs) identical operator
    CHECK((Eigen::MatrixXd(a0) - Eigen::MatrixXd(a1)).norm() <
          1e-12 * Eigen::MatrixXd(a0).norm());
}

TEST_CASE("solve round-trip returns a planted solution") {
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 1);
    const MaterialParams params = manufactured_params();
    const SystemState prev = interpolate_initial(setup, {}, {});
    const auto [A, b] = assemble_step(prev, setup, params, setup.dt);

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    Vector planted(setup.n_system());
    for (int i = 0; i < planted.size(); ++i)
        planted[i] = amp(rng);
    const Vector rhs = A * planted;

    DirectSolver solver;
    solver.factorize(A);
    const Vector recovered = solver.solve(rhs);
    CHECK((recovered - planted).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("positivity failure during assembly names the cell") {
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 1);
    MaterialParams params = manufactured_params();
    params.lambda1 = 4.0;
    params.delta = 1.0;

    // strong uniform compression: div u ~ -1 pushes 1 + lambda1 T(div u) < 0
    SystemState prev = interpolate_initial(setup, {}, {});
    prev.u = nodal_interpolate(
        VectorField([](const Eigen::Vector2d& x) {
            return Eigen::Vector2d(-0.5 * x.x(), -0.5 * x.y());
        }),
        setup.dof_u);
    CHECK_THROWS_AS((void)assemble_step(prev, setup, params, setup.dt), PositivityError);
    try {
        (void)assemble_step(prev, setup, params, setup.dt);
    } catch (const PositivityError& ex) {
        CHECK(std::string(ex.what()).find("cell") != std::string::npos);
    }
}

TEST_CASE("time loop: single step equals assemble+solve, accumulated pressure adds up") {
    const ManufacturedCase mcase = make_manufactured_case(ThetaKind::exp_decay);
    const ProblemSetup setup = make_manufactured_setup(mcase, 2, 2);
    const MaterialParams params = mcase.params;
    const SystemState initial = manufactured_initial(mcase, setup);

    const TimeLoopResult result = time_loop(setup, params, initial);
    REQUIRE(result.history.size() == 3);
    REQUIRE(result.diagnostics.size() == 2);

    // one manual step reproduces history[1]
    const auto [A, b] = assemble_step(initial, setup, params, setup.dt);
    DirectSolver solver;
    const SystemState manual = solve_step(solver, A, b, setup, 1, setup.dt);
    CHECK((manual.u - result.history[1].u).lpNorm<Eigen::Infinity>() < 1e-11);
    CHECK((manual.v - result.history[1].v).lpNorm<Eigen::Infinity>() < 1e-11);
    CHECK((manual.p - result.history[1].p).lpNorm<Eigen::Infinity>() < 1e-10);

    // P_h^n additivity and P_h^0 = 0 by construction
    const Vector expected_integral =
        setup.dt * result.history[1].p + setup.dt * result.history[2].p;
    CHECK((result.diagnostics[1].pressure_integral - expected_integral)
              .lpNorm<Eigen::Infinity>() < 1e-13);

    // positivity margins recorded
    CHECK(result.diagnostics[0].min_shear_coeff > 0.0);
    CHECK(result.diagnostics[0].min_trace_factor > 0.0);
}

TEST_CASE("zero data and ICs: the whole loop stays exactly zero") {
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 5);
    const MaterialParams params = manufactured_params();
    const TimeLoopResult result =
        time_loop(setup, params, interpolate_initial(setup, {}, {}));
    for (const SystemState& state : result.history) {
        CHECK(state.u.norm() < 1e-12);
        CHECK(state.v.norm() < 1e-12);
        CHECK(state.p.norm() < 1e-12);
    }
    for (const StepDiagnostics& diag : result.diagnostics) {
        CHECK(diag.u_l2_sq < 1e-24);
        CHECK(diag.v_l2_sq < 1e-24);
    }
}

TEST_CASE("residual of accepted steps and sensitivity to perturbations") {
    const ManufacturedCase mcase = make_manufactured_case(ThetaKind::exp_decay);
    const ProblemSetup setup = make_manufactured_setup(mcase, 3, 4);
    const SystemState initial = manufactured_initial(mcase, setup);
    const TimeLoopResult result = time_loop(setup, mcase.params, initial);

    for (std::size_t n = 1; n < result.history.size(); ++n) {
        const double residual = residual_check(result.history[n], result.history[n - 1],
                                               setup, mcase.params);
        CHECK(residual <= 1e-9);
    }

    // perturbing one coefficient by 1e-3 must be visible in the residual
    SystemState perturbed = result.history[1];
    perturbed.u[perturbed.u.size() / 2] += 1e-3;
    const double bad = residual_check(perturbed, result.history[0], setup, mcase.params);
    CHECK(bad > 1e-6);

    // zero state with zero data has zero residual
    const ProblemSetup hsetup = homogeneous_setup(2, 0.1, 1);
    const SystemState zero_state = interpolate_initial(hsetup, {}, {});
    SystemState zero_next = zero_state;
    zero_next.step = 1;
    zero_next.time = hsetup.dt;
    CHECK(residual_check(zero_next, zero_state, hsetup, manufactured_params()) == 0.0);
}

TEST_CASE("discrete divergence constraint holds at solver tolerance") {
    const ManufacturedCase mcase = make_manufactured_case(ThetaKind::exp_decay);
    const ProblemSetup setup = make_manufactured_setup(mcase, 3, 3);
    const SystemState initial = manufactured_initial(mcase, setup);
    const TimeLoopResult result = time_loop(setup, mcase.params, initial);

    // continuity rows of the assembled system evaluated at the solution
    for (std::size_t n = 1; n < result.history.size(); ++n) {
        const auto [A, b] =
            assemble_step(result.history[n - 1], setup, mcase.params, result.history[n].time);
        const Vector x = pack_state(setup, result.history[n]);
        const Vector r = A * x - b;
        const int off_p = setup.n_dofs_u() + setup.n_dofs_v();
        CHECK(r.segment(off_p, setup.n_dofs_p()).norm() < 1e-9);
    }
}

TEST_CASE("unforced homogeneous run dissipates the fluid energy monotonically") {
    const ProblemSetup setup = homogeneous_setup(3, 0.05, 8);
    const MaterialParams params = manufactured_params();

    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    SystemState initial = interpolate_initial(setup, {}, {});
    for (int node = 0; node < setup.dof_v.n_nodes(); ++node) {
        if (setup.dof_v.is_constrained_node(node))
            continue;
        initial.v[2 * node] = amp(rng);
        initial.v[2 * node + 1] = amp(rng);
    }
    for (int node = 0; node < setup.dof_u.n_nodes(); ++node) {
        if (setup.dof_u.is_constrained_node(node))
            continue;
        initial.u[2 * node] = 0.01 * amp(rng);
        initial.u[2 * node + 1] = 0.01 * amp(rng);
    }

    const TimeLoopResult result = time_loop(setup, params, initial);
    double previous = std::sqrt(field_norms_sq(initial.v, setup.dof_v, gauss_rule(3)).l2);
    for (const StepDiagnostics& diag : result.diagnostics) {
        const double current = std::sqrt(diag.v_l2_sq);
        CHECK(current <= previous + 1e-10);
        previous = current;
    }
}

TEST_CASE("gauge invariants are enforced") {
    const TimeVectorField zero = [](double, const Eigen::Vector2d&) {
        return Eigen::Vector2d::Zero().eval();
    };
    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> all;
    for (int tag = 0; tag < kNumBoundaryTags; ++tag)
        all[tag] = zero;
    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> partial;
    partial[0] = zero;
    partial[2] = zero;

    // all-Dirichlet velocity without a gauge: rejected
    CHECK_THROWS_AS(make_problem_setup(build_unit_square_mesh(2), all, all, {}, {},
                                       ViscousForm::grad_grad, PressureGauge::none, 0.1, 1),
                    std::invalid_argument);
    // traction boundary with a gauge: rejected
    CHECK_THROWS_AS(make_problem_setup(build_unit_square_mesh(2), all, partial, {}, {},
                                       ViscousForm::sym_grad, PressureGauge::zero_mean, 0.1,
                                       1),
                    std::invalid_argument);
    // solved pressure has zero mean under the gauge
    const ProblemSetup setup = homogeneous_setup(2, 0.1, 1);
    const ManufacturedCase mcase = make_manufactured_case(ThetaKind::exp_decay);
    const ProblemSetup msetup = make_manufactured_setup(mcase, 2, 2);
    const TimeLoopResult result =
        time_loop(msetup, mcase.params, manufactured_initial(mcase, msetup));
    const FeTable table = tabulate(msetup.dof_p, gauss_rule(3));
    for (std::size_t n = 1; n < result.history.size(); ++n) {
        double mean = 0.0;
        std::vector<int> nodes(4);
        for (int cell = 0; cell < msetup.dof_p.n_cells(); ++cell) {
            msetup.dof_p.cell_nodes(cell, nodes.data());
            for (int q = 0; q < table.n_points; ++q)
                for (int a = 0; a < 4; ++a)
                    mean += table.weights[q] * table.val(q, a) *
                            result.history[n].p[nodes[a]];
        }
        CHECK(std::abs(mean) < 1e-10);
    }
}
