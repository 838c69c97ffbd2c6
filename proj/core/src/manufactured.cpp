#include "porofem/manufactured.hpp"

#include <cmath>

#include "porofem/norms.hpp"
#include "porofem/quadrature.hpp"

namespace porofem {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double theta(ThetaKind kind, double t) {
    return kind == ThetaKind::exp_decay ? std::exp(-t) : std::sin(3.0 * M_PI * t);
}

double theta_dt(ThetaKind kind, double t) {
    return kind == ThetaKind::exp_decay ? -std::exp(-t) : 3.0 * M_PI * std::cos(3.0 * M_PI * t);
}

MaterialParams manufactured_params() {
    MaterialParams p;
    p.alpha = 1.0;
    p.nu = 1.0;
    p.rho = 1.0;
    p.rho_s = 0.0;
    p.E1 = 1.0;
    p.E2 = -0.2;
    p.lambda1 = 2.0;
    p.lambda2 = 2.0;
    p.delta = 0.4;
    return p;
}

ManufacturedCase make_manufactured_case(ThetaKind kind) {
    return ManufacturedCase{kind, manufactured_params()};
}

ExactPoint exact_fields(const ManufacturedCase& mcase, double t, const Eigen::Vector2d& x) {
    const double th = theta(mcase.theta_kind, t);
    const double th_dt = theta_dt(mcase.theta_kind, t);
    const double c1 = std::cos(kTwoPi * x.x());
    const double s1 = std::sin(kTwoPi * x.x());
    const double c2 = std::cos(kTwoPi * x.y());
    const double s2 = std::sin(kTwoPi * x.y());

    ExactPoint e;
    const Eigen::Vector2d u_shape(c1 * s2, s1 * c2);
    const Eigen::Vector2d v_shape(s1 * c2, -c1 * s2);
    e.u = (th / 100.0) * u_shape;
    e.du_dt = (th_dt / 100.0) * u_shape;
    e.v = th * v_shape;
    e.dv_dt = th_dt * v_shape;

    const double k = kTwoPi;
    e.grad_u << -k * s1 * s2, k * c1 * c2, k * c1 * c2, -k * s1 * s2;
    e.grad_u *= th / 100.0;
    e.grad_v << k * c1 * c2, -k * s1 * s2, k * s1 * s2, -k * c1 * c2;
    e.grad_v *= th;

    const double x1 = x.x();
    const double x2 = x.y();
    e.p = th * (60.0 * x1 * x1 * x2 - 20.0 * x2 * x2 * x2 - 5.0);
    e.grad_p = th * Eigen::Vector2d(120.0 * x1 * x2, 60.0 * x1 * x1 - 60.0 * x2 * x2);
    return e;
}

Eigen::Vector2d forcing_fluid(const ManufacturedCase& mcase, double t,
                              const Eigen::Vector2d& x) {
    const ExactPoint e = exact_fields(mcase, t, x);
    const MaterialParams& p = mcase.params;
    // lap v = -2 (2 pi)^2 v for the trig profile
    const Eigen::Vector2d lap_v = -2.0 * kTwoPi * kTwoPi * e.v;
    return p.rho * e.dv_dt + p.alpha * (e.v - e.du_dt) - p.nu * lap_v + e.grad_p;
}

namespace {

Eigen::Matrix2d exact_stress(const ManufacturedCase& mcase, double t,
                             const Eigen::Vector2d& x) {
    const ExactPoint e = exact_fields(mcase, t, x);
    const Eigen::Matrix2d strain = 0.5 * (e.grad_u + e.grad_u.transpose());
    return stress_tensor(strain, mcase.params);
}

} // namespace

Eigen::Vector2d forcing_solid(const ManufacturedCase& mcase, double t,
                              const Eigen::Vector2d& x, double fd_step) {
    const double h = fd_step;
    const Eigen::Matrix2d t_xp = exact_stress(mcase, t, x + Eigen::Vector2d(h, 0.0));
    const Eigen::Matrix2d t_xm = exact_stress(mcase, t, x - Eigen::Vector2d(h, 0.0));
    const Eigen::Matrix2d t_yp = exact_stress(mcase, t, x + Eigen::Vector2d(0.0, h));
    const Eigen::Matrix2d t_ym = exact_stress(mcase, t, x - Eigen::Vector2d(0.0, h));

    Eigen::Vector2d div_t;
    div_t[0] = (t_xp(0, 0) - t_xm(0, 0) + t_yp(0, 1) - t_ym(0, 1)) / (2.0 * h);
    div_t[1] = (t_xp(1, 0) - t_xm(1, 0) + t_yp(1, 1) - t_ym(1, 1)) / (2.0 * h);

    const ExactPoint e = exact_fields(mcase, t, x);
    return -div_t - mcase.params.alpha * (e.v - e.du_dt);
}

RunErrors error_metrics(const std::vector<SystemState>& history, const ManufacturedCase& mcase,
                        const ProblemSetup& setup) {
    const QuadratureRule rule = gauss_rule(4);
    RunErrors out;
    double sum_u_h1 = 0.0;
    double sum_v_h1 = 0.0;
    double sum_p_l2 = 0.0;
    for (const SystemState& state : history) {
        if (state.step == 0)
            continue;
        const double t = state.time;
        const ExactVector exact_u{
            [&, t](const Eigen::Vector2d& x) { return exact_fields(mcase, t, x).u; },
            [&, t](const Eigen::Vector2d& x) { return exact_fields(mcase, t, x).grad_u; }};
        const ExactVector exact_v{
            [&, t](const Eigen::Vector2d& x) { return exact_fields(mcase, t, x).v; },
            [&, t](const Eigen::Vector2d& x) { return exact_fields(mcase, t, x).grad_v; }};
        const ExactScalar exact_p{
            [&, t](const Eigen::Vector2d& x) { return exact_fields(mcase, t, x).p; },
            [&, t](const Eigen::Vector2d& x) { return exact_fields(mcase, t, x).grad_p; }};

        const ErrorNorms eu = error_norms(state.u, setup.dof_u, exact_u, rule);
        const ErrorNorms ev = error_norms(state.v, setup.dof_v, exact_v, rule);
        const ErrorNorms ep = error_norms(state.p, setup.dof_p, exact_p, rule);

        sum_u_h1 += setup.dt * eu.h1_semi * eu.h1_semi;
        sum_v_h1 += setup.dt * ev.h1_semi * ev.h1_semi;
        sum_p_l2 += setup.dt * ep.l2 * ep.l2;
        out.u_l2 = std::max(out.u_l2, eu.l2);
        out.v_l2 = std::max(out.v_l2, ev.l2);
    }
    out.u_h01 = std::sqrt(sum_u_h1);
    out.v_h01 = std::sqrt(sum_v_h1);
    out.p_l2 = std::sqrt(sum_p_l2);
    return out;
}

ProblemSetup make_manufactured_setup(const ManufacturedCase& mcase, int level, int n_steps,
                                     ViscousForm viscous_form, double final_time) {
    Mesh mesh = build_unit_square_mesh(level);

    const auto exact_u_trace = [mcase](double t, const Eigen::Vector2d& x) {
        return exact_fields(mcase, t, x).u;
    };
    const auto exact_v_trace = [mcase](double t, const Eigen::Vector2d& x) {
        return exact_fields(mcase, t, x).v;
    };
    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> bc_u;
    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> bc_v;
    for (int tag = 0; tag < kNumBoundaryTags; ++tag) {
        bc_u[tag] = exact_u_trace;
        bc_v[tag] = exact_v_trace;
    }

    return make_problem_setup(
        std::move(mesh), std::move(bc_u), std::move(bc_v),
        [mcase](double t, const Eigen::Vector2d& x) { return forcing_solid(mcase, t, x); },
        [mcase](double t, const Eigen::Vector2d& x) { return forcing_fluid(mcase, t, x); },
        viscous_form, PressureGauge::zero_mean, final_time / n_steps, n_steps);
}

SystemState manufactured_initial(const ManufacturedCase& mcase, const ProblemSetup& setup) {
    return interpolate_initial(
        setup, [&](const Eigen::Vector2d& x) { return exact_fields(mcase, 0.0, x).u; },
        [&](const Eigen::Vector2d& x) { return exact_fields(mcase, 0.0, x).v; });
}

} // namespace porofem
