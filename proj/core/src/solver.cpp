#include "porofem/solver.hpp"

#include <cmath>
#include <ostream>
#include <string>

#ifdef POROFEM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

#include "porofem/norms.hpp"
#include "porofem/quadrature.hpp"

namespace porofem {

struct DirectSolver::Impl {
#ifdef POROFEM_HAVE_UMFPACK
    Eigen::UmfPackLU<SparseMatrix> lu;
    static constexpr const char* name = "umfpack";
    Impl() {
        // the monolithic pattern is structurally symmetric
        lu.umfpackControl()[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    }
#else
    Eigen::SparseLU<SparseMatrix> lu;
    static constexpr const char* name = "eigen-sparselu";
#endif
    bool analyzed = false;
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

void DirectSolver::factorize(const SparseMatrix& A) {
    if (!impl_->analyzed) {
        impl_->lu.analyzePattern(A);
        impl_->analyzed = true;
    }
    impl_->lu.factorize(A);
    if (impl_->lu.info() != Eigen::Success)
        throw SolverError(
            "DirectSolver: factorization failed (singular system; check the pressure "
            "gauge and boundary conditions)");
}

Vector DirectSolver::solve(const Vector& rhs) const {
    return impl_->lu.solve(rhs);
}

const char* DirectSolver::backend() const { return Impl::name; }

namespace {

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b,
                         double b_norm) {
    const double abs_residual = (A * x - b).norm();
    return b_norm > 0.0 ? abs_residual / b_norm : abs_residual;
}

/// Restores prescribed values on the constrained entries of x and splits the
/// monolithic vector into a state.
SystemState unpack_state(Vector x, const ProblemSetup& setup, const Vector& bc, int step,
                         double t) {
    for (int d = 0; d < setup.n_dofs_u(); ++d)
        if (setup.dof_u.is_constrained_dof(d))
            x[d] = bc[d];
    const int off_v = setup.n_dofs_u();
    for (int d = 0; d < setup.n_dofs_v(); ++d)
        if (setup.dof_v.is_constrained_dof(d))
            x[off_v + d] = bc[off_v + d];

    SystemState state;
    state.step = step;
    state.time = t;
    state.u = x.head(setup.n_dofs_u());
    state.v = x.segment(setup.n_dofs_u(), setup.n_dofs_v());
    state.p = x.segment(setup.n_dofs_u() + setup.n_dofs_v(), setup.n_dofs_p());
    if (setup.pressure_gauge == PressureGauge::zero_mean)
        state.gauge_multiplier = x[setup.n_system() - 1];
    return state;
}

} // namespace

SystemState solve_step(DirectSolver& solver, const SparseMatrix& A, const Vector& b,
                       const ProblemSetup& setup, int step, double t,
                       double* residual_out) {
    solver.factorize(A);
    Vector x = solver.solve(b);

    const double residual = relative_residual(A, x, b, b.norm());
    if (!(residual <= kSolverResidualTol))
        throw SolverError("solve_step: relative residual " + std::to_string(residual) +
                          " exceeds tolerance at step " + std::to_string(step));
    if (residual_out)
        *residual_out = residual;
    return unpack_state(std::move(x), setup, setup.boundary_values(t), step, t);
}

double residual_check(const SystemState& state, const SystemState& prev,
                      const ProblemSetup& setup, const MaterialParams& params) {
    const auto [A, b] = assemble_step(prev, setup, params, state.time);
    const Vector x = pack_state(setup, state);
    return relative_residual(A, x, b, b.norm());
}

TimeLoopResult time_loop(const ProblemSetup& setup, const MaterialParams& params,
                         const SystemState& initial, const TimeLoopCallbacks& callbacks,
                         std::ostream* log) {
    setup.validate();
    const double h = setup.mesh.cell_diameter();
    if (log && h * h > setup.dt)
        *log << "time_loop: h^2 = " << h * h << " exceeds dt = " << setup.dt
             << "; the a priori constants are no longer step-size uniform\n";

    TimeLoopResult result;
    result.history.reserve(setup.n_steps + 1);
    result.diagnostics.reserve(setup.n_steps);
    result.history.push_back(initial);

    StepAssembler assembler(setup, params);
    DirectSolver solver;
    bool have_factor = false;
    const QuadratureRule diag_rule = gauss_rule(3);
    Vector pressure_integral = Vector::Zero(setup.n_dofs_p());

    // Warm start for the per-step refinement iteration.
    Vector x = pack_state(setup, initial);

    // The factorization from an earlier step stays a perfect preconditioner
    // while the frozen coefficients drift slowly, so each step runs
    // iterative refinement on the exact current system and only
    // refactorizes when convergence stalls. The per-step residual bound is
    // enforced on the exact system either way.
    constexpr double inner_tol = 0.1 * kSolverResidualTol;
    constexpr int stale_iter_budget = 3;
    constexpr int max_iter = 12;

    for (int n = 1; n <= setup.n_steps; ++n) {
        const double t = n * setup.dt;
        const SystemState& prev = result.history.back();
        assembler.assemble(prev, t);
        const SparseMatrix& A = assembler.matrix();
        const Vector& b = assembler.rhs();
        const double b_norm = b.norm();

        if (!have_factor) {
            solver.factorize(A);
            have_factor = true;
        }
        double rel = relative_residual(A, x, b, b_norm);
        bool refreshed = false;
        int iterations = 0;
        while (rel > inner_tol) {
            if (iterations >= max_iter)
                throw SolverError("time_loop: refinement stalled at residual " +
                                  std::to_string(rel) + " in step " + std::to_string(n));
            if (iterations >= stale_iter_budget && !refreshed) {
                solver.factorize(A);
                refreshed = true;
            }
            x += solver.solve(b - A * x);
            ++iterations;
            rel = relative_residual(A, x, b, b_norm);
        }

        StepDiagnostics diag;
        diag.solver_residual = rel;
        SystemState state = unpack_state(x, setup, assembler.prescribed_values(), n, t);

        diag.min_shear_coeff = assembler.min_shear_coeff();
        diag.min_trace_factor = assembler.min_trace_factor();
        diag.max_abs_div_prev = assembler.max_abs_div_prev();
        const FieldNormsSq norms_u = field_norms_sq(state.u, setup.dof_u, diag_rule);
        const FieldNormsSq norms_v = field_norms_sq(state.v, setup.dof_v, diag_rule);
        diag.u_l2_sq = norms_u.l2;
        diag.strain_l2_sq = norms_u.strain;
        diag.div_u_l2_sq = norms_u.div;
        diag.v_l2_sq = norms_v.l2;
        diag.grad_v_l2_sq = norms_v.grad;
        pressure_integral += setup.dt * state.p;
        diag.pressure_integral = pressure_integral;

        if (callbacks.on_step)
            callbacks.on_step(state, diag);
        result.history.push_back(std::move(state));
        result.diagnostics.push_back(std::move(diag));
    }
    return result;
}

} // namespace porofem
