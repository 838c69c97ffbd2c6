#pragma once

#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "porofem/problem.hpp"

namespace porofem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Assembles the monolithic linear system of one semi-implicit step over the
/// unknowns (u^n, v^n, p^n [, gauge multiplier]):
///
///   solid rows   (alpha/dt) M u^n + (1/E1) K_b1 u^n + (|E2|/E1) D_b2 u^n
///                - alpha M v^n                       = (alpha/dt) M u^prev + (f_s, z)
///   fluid rows   (rho/dt + alpha) M v^n + nu K_visc v^n - B^T p^n
///                - (alpha/dt) M u^n  = (rho/dt) M v^prev - (alpha/dt) M u^prev + (f_f, w)
///   continuity   B v^n (+ gauge column)              = 0
///
/// with K_b1, D_b2 carrying the constitutive coefficients frozen at the
/// previous displacement. Dirichlet DOFs are eliminated by lifting: their
/// rows become identity, their columns move to the right-hand side, so the
/// block pattern stays symmetric.
///
/// The assembler keeps the sparse pattern and the tabulated element data
/// between steps; only values are rewritten.
class StepAssembler {
public:
    StepAssembler(const ProblemSetup& setup, const MaterialParams& params);

    /// Assembles the system at time t with coefficients frozen at `prev`.
    /// Throws PositivityError naming the cell when a constitutive
    /// coefficient loses positivity at a quadrature point.
    void assemble(const SystemState& prev, double t);

    const SparseMatrix& matrix() const { return matrix_; }
    const Vector& rhs() const { return rhs_; }
    /// Prescribed boundary values of the last assembled step (system-sized,
    /// zero on free DOFs).
    const Vector& prescribed_values() const { return bc_; }

    double min_shear_coeff() const { return min_shear_coeff_; }
    double min_trace_factor() const { return min_trace_factor_; }
    double max_abs_div_prev() const { return max_abs_div_prev_; }

private:
    struct Tables;
    void build_tables();
    template <typename Emit>
    void assemble_cells(const SystemState& prev, double t, const Vector& bc, Emit&& emit);

    const ProblemSetup& setup_;
    MaterialParams params_;

    // offsets of the three fields in the monolithic vector
    int off_u_ = 0, off_v_ = 0, off_p_ = 0, gauge_row_ = -1;

    // per-quadrature-point element data shared by all (congruent) cells
    int nq_ = 0;
    std::vector<double> qweight_;
    std::vector<double> phi_u_;           // [q][a] Q2 values
    std::vector<Eigen::Vector2d> dphi_u_; // [q][a] Q2 physical gradients
    std::vector<double> phi_p_;           // [q][i] Q1 values
    // constant local blocks (18x18 vector-dof indexing, 2a+c)
    Eigen::Matrix<double, 18, 18> mass_loc_;
    Eigen::Matrix<double, 18, 18> visc_loc_;
    Eigen::Matrix<double, 4, 18> b_loc_;
    Eigen::Matrix<double, 4, 1> pw_loc_; // integral of each Q1 basis function

    bool pattern_built_ = false;
    SparseMatrix matrix_;
    Vector rhs_;
    Vector bc_;

    double min_shear_coeff_ = 0.0;
    double min_trace_factor_ = 0.0;
    double max_abs_div_prev_ = 0.0;
};

/// One-shot convenience wrapper around StepAssembler.
std::pair<SparseMatrix, Vector> assemble_step(const SystemState& prev,
                                              const ProblemSetup& setup,
                                              const MaterialParams& params, double t);

/// Stacks a state into monolithic ordering (with the gauge slot when used).
Vector pack_state(const ProblemSetup& setup, const SystemState& state);

} // namespace porofem
