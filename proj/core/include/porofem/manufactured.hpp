#pragma once

#include <vector>

#include <Eigen/Core>

#include "porofem/constitutive.hpp"
#include "porofem/problem.hpp"
#include "porofem/solver.hpp"

namespace porofem {

/// Time factor of the manufactured solution: exp(-t) stresses the spatial
/// error, sin(3 pi t) the temporal one.
enum class ThetaKind { exp_decay, sine };

double theta(ThetaKind kind, double t);
double theta_dt(ThetaKind kind, double t);

/// Manufactured-solution test case on the unit square: a divergence-free
/// trig velocity, a trig displacement two orders of magnitude smaller, and a
/// cubic zero-mean pressure, all scaled by theta(t).
struct ManufacturedCase {
    ThetaKind theta_kind = ThetaKind::exp_decay;
    MaterialParams params;
};

/// Parameters of the convergence experiments (alpha = nu = rho = 1,
/// E1 = 1, E2 = -0.2, lambda1 = lambda2 = 2, delta = 0.4).
MaterialParams manufactured_params();

ManufacturedCase make_manufactured_case(ThetaKind kind);

/// Closed-form fields and first derivatives at one space-time point.
struct ExactPoint {
    Eigen::Vector2d u;
    Eigen::Matrix2d grad_u; // row i = gradient of component i
    Eigen::Vector2d du_dt;
    Eigen::Vector2d v;
    Eigen::Matrix2d grad_v;
    Eigen::Vector2d dv_dt;
    double p = 0.0;
    Eigen::Vector2d grad_p;
};

ExactPoint exact_fields(const ManufacturedCase& mcase, double t, const Eigen::Vector2d& x);

/// Strong residual of the fluid momentum equation evaluated on the exact
/// fields: rho dv/dt + alpha (v - du/dt) - nu lap(v) + grad p, with the
/// Laplacian in closed form.
Eigen::Vector2d forcing_fluid(const ManufacturedCase& mcase, double t,
                              const Eigen::Vector2d& x);

/// Strong residual of the solid balance: -div T(u) - alpha (v - du/dt).
/// div T is computed by second-order central differences of the pointwise
/// stress with step `fd_step`, an oracle that is independent of any symbolic
/// expansion of the nonlinear law.
Eigen::Vector2d forcing_solid(const ManufacturedCase& mcase, double t,
                              const Eigen::Vector2d& x, double fd_step = 1e-5);

/// The error norms of a manufactured run, following the convergence-study
/// conventions: time-integrated H1 seminorms for u and v, max-in-time L2
/// norms for u and v, time-integrated L2 norm for p.
struct RunErrors {
    double u_h01 = 0.0;
    double u_l2 = 0.0;
    double v_h01 = 0.0;
    double v_l2 = 0.0;
    double p_l2 = 0.0;
};

RunErrors error_metrics(const std::vector<SystemState>& history, const ManufacturedCase& mcase,
                        const ProblemSetup& setup);

/// Full problem setup of a manufactured run at refinement level m with N
/// steps: exact traces as Dirichlet data on the whole boundary, derived
/// forcing terms, zero-mean pressure gauge.
ProblemSetup make_manufactured_setup(const ManufacturedCase& mcase, int level, int n_steps,
                                     ViscousForm viscous_form = ViscousForm::grad_grad,
                                     double final_time = 1.0);

/// Initial state of a manufactured run (nodal interpolation of the exact
/// fields at t = 0).
SystemState manufactured_initial(const ManufacturedCase& mcase, const ProblemSetup& setup);

} // namespace porofem
