#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "porofem/constitutive.hpp"
#include "porofem/dofmap.hpp"
#include "porofem/mesh.hpp"

namespace porofem {

/// Weak form of the fluid viscous term: grad_grad integrates
/// nu * (grad v : grad w), sym_grad integrates 2 nu * (eps(v) : eps(w)).
/// The natural boundary condition of the symmetric form on unconstrained
/// facets is (2 nu eps(v) - p I) n = 0.
enum class ViscousForm { grad_grad, sym_grad };

/// zero_mean pins the pressure constant through a scalar Lagrange
/// multiplier; required when the velocity is Dirichlet on the whole
/// boundary, forbidden otherwise (a traction facet already fixes the
/// pressure level).
enum class PressureGauge { zero_mean, none };

/// Time-dependent 2-vector field (boundary data, forcing). An empty
/// function means "absent" (no data on that side / zero forcing).
using TimeVectorField = std::function<Eigen::Vector2d(double, const Eigen::Vector2d&)>;

/// One Dirichlet spec per boundary side; empty entries are natural sides.
using BoundaryConditions = std::array<TimeVectorField, kNumBoundaryTags>;

/// Everything that defines one transient run: mesh, spaces, boundary
/// conditions, forcing, and stepping parameters. The displacement and
/// velocity use Q2 vector spaces, the pressure Q1, on the same mesh.
struct ProblemSetup {
    Mesh mesh;
    DofMap dof_u;
    DofMap dof_v;
    DofMap dof_p;

    BoundaryConditions dirichlet_u{};
    BoundaryConditions dirichlet_v{};

    /// Volumetric forcing; empty function means zero.
    TimeVectorField f_solid;
    TimeVectorField f_fluid;

    ViscousForm viscous_form = ViscousForm::grad_grad;
    PressureGauge pressure_gauge = PressureGauge::zero_mean;

    double dt = 0.1;
    int n_steps = 1;

    int n_dofs_u() const { return dof_u.n_dofs(); }
    int n_dofs_v() const { return dof_v.n_dofs(); }
    int n_dofs_p() const { return dof_p.n_dofs(); }
    /// Size of the monolithic system including the optional gauge row.
    int n_system() const {
        return n_dofs_u() + n_dofs_v() + n_dofs_p() +
               (pressure_gauge == PressureGauge::zero_mean ? 1 : 0);
    }

    /// Prescribed boundary values of both fields at time t, stacked in
    /// system ordering (zeros on free DOFs and on the pressure block).
    Vector boundary_values(double t) const;

    /// Enforces the setup invariants (positive step, gauge consistent with
    /// the velocity boundary conditions). Throws std::invalid_argument.
    void validate() const;
};

/// Builds a setup over `mesh`: marks the Dirichlet sides recorded in the
/// spec arrays on the respective DofMaps and validates the gauge choice.
ProblemSetup make_problem_setup(Mesh mesh, BoundaryConditions dirichlet_u,
                                BoundaryConditions dirichlet_v, TimeVectorField f_solid,
                                TimeVectorField f_fluid, ViscousForm viscous_form,
                                PressureGauge gauge, double dt, int n_steps);

/// The same Dirichlet spec on all four sides.
BoundaryConditions on_all_sides(TimeVectorField value);

/// Discrete solution at one time level.
struct SystemState {
    int step = 0;
    double time = 0.0;
    Vector u;
    Vector v;
    Vector p;
    /// Value of the zero-mean Lagrange multiplier (0 when no gauge is used);
    /// kept so the full block system can be re-evaluated exactly.
    double gauge_multiplier = 0.0;
};

/// Per-step health and energy record.
struct StepDiagnostics {
    /// min over quadrature points of 1 + lambda1 * T_delta(div u_prev)
    double min_shear_coeff = 0.0;
    /// min over quadrature points of F(T_delta(div u_prev))
    double min_trace_factor = 0.0;
    /// max over quadrature points of |div u_prev|
    double max_abs_div_prev = 0.0;
    /// relative algebraic residual of the solved linear system
    double solver_residual = 0.0;
    double u_l2_sq = 0.0;
    double v_l2_sq = 0.0;
    double strain_l2_sq = 0.0;
    double grad_v_l2_sq = 0.0;
    double div_u_l2_sq = 0.0;
    /// time-accumulated pressure sum_{i<=n} dt * p_h^i
    Vector pressure_integral;
};

/// Interpolates the initial fields (pressure starts at zero).
SystemState interpolate_initial(const ProblemSetup& setup, const VectorField& u0,
                                const VectorField& v0);

} // namespace porofem
