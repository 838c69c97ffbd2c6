#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "porofem/assembly.hpp"
#include "porofem/problem.hpp"

namespace porofem {

/// Relative algebraic residual every accepted step must satisfy.
constexpr double kSolverResidualTol = 1e-10;

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sparse direct factorization (UMFPACK when available, Eigen::SparseLU
/// otherwise). The symbolic analysis is reused across numeric
/// refactorizations with the same pattern.
class DirectSolver {
public:
    DirectSolver();
    ~DirectSolver();
    DirectSolver(DirectSolver&&) noexcept;
    DirectSolver& operator=(DirectSolver&&) noexcept;

    /// Factorizes A; throws SolverError on a singular matrix (typically a
    /// gauge/boundary-condition misconfiguration).
    void factorize(const SparseMatrix& A);
    Vector solve(const Vector& rhs) const;
    const char* backend() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Solves one assembled step and unpacks the solution. Verifies the
/// relative residual ||A x - b|| / ||b|| <= kSolverResidualTol and restores
/// the prescribed values on Dirichlet DOFs; throws SolverError otherwise.
/// `residual_out`, when non-null, receives the measured residual.
SystemState solve_step(DirectSolver& solver, const SparseMatrix& A, const Vector& b,
                       const ProblemSetup& setup, int step, double t,
                       double* residual_out = nullptr);

/// Re-assembles the block system of the step that produced `state` and
/// returns the relative residual of `state` in it. Independent of the
/// factorization path; values at or below 1e-9 certify the step.
double residual_check(const SystemState& state, const SystemState& prev,
                      const ProblemSetup& setup, const MaterialParams& params);

struct TimeLoopCallbacks {
    std::function<void(const SystemState&, const StepDiagnostics&)> on_step;
};

struct TimeLoopResult {
    /// States 0..N (index 0 is the initial state).
    std::vector<SystemState> history;
    /// Diagnostics for steps 1..N.
    std::vector<StepDiagnostics> diagnostics;

    const SystemState& final_state() const { return history.back(); }
};

/// Runs the semi-implicit scheme for setup.n_steps steps starting from
/// `initial`. Coefficients are frozen at step n-1, the monolithic system is
/// assembled and factorized anew each step, and per-step diagnostics
/// (coefficient positivity margins, energies, accumulated pressure) are
/// recorded. `log`, when non-null, receives step-restriction warnings.
TimeLoopResult time_loop(const ProblemSetup& setup, const MaterialParams& params,
                         const SystemState& initial, const TimeLoopCallbacks& callbacks = {},
                         std::ostream* log = nullptr);

} // namespace porofem
