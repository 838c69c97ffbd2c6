#include "porofem/assembly.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "porofem/fe_tables.hpp"
#include "porofem/quadrature.hpp"

namespace porofem {

namespace {
constexpr int kVecDofs = 18; // 9 Q2 nodes x 2 components
constexpr int kPreDofs = 4;  // Q1 nodes per cell
} // namespace

Vector ProblemSetup::boundary_values(double t) const {
    Vector bc = Vector::Zero(n_system());
    const auto eval_u = [&](BoundaryTag tag, const Eigen::Vector2d& x) {
        return (*dirichlet_u[static_cast<int>(tag)])(t, x);
    };
    const auto eval_v = [&](BoundaryTag tag, const Eigen::Vector2d& x) {
        return (*dirichlet_v[static_cast<int>(tag)])(t, x);
    };
    if (dof_u.n_constrained_nodes() > 0)
        bc.head(n_dofs_u()) = dirichlet_values(dof_u, eval_u);
    if (dof_v.n_constrained_nodes() > 0)
        bc.segment(n_dofs_u(), n_dofs_v()) = dirichlet_values(dof_v, eval_v);
    return bc;
}

void ProblemSetup::validate() const {
    if (!(dt > 0.0))
        throw std::invalid_argument("ProblemSetup: dt must be positive");
    if (n_steps < 1)
        throw std::invalid_argument("ProblemSetup: n_steps must be >= 1");
    bool all_v_dirichlet = true;
    for (int tag = 0; tag < kNumBoundaryTags; ++tag)
        all_v_dirichlet = all_v_dirichlet && dirichlet_v[tag].has_value();
    if (all_v_dirichlet && pressure_gauge != PressureGauge::zero_mean)
        throw std::invalid_argument(
            "ProblemSetup: velocity is Dirichlet on the whole boundary; the pressure "
            "needs the zero_mean gauge or the system is singular");
    if (!all_v_dirichlet && pressure_gauge != PressureGauge::none)
        throw std::invalid_argument(
            "ProblemSetup: traction facets fix the pressure level; remove the gauge");
}

ProblemSetup make_problem_setup(
    Mesh mesh, std::array<std::optional<TimeVectorField>, kNumBoundaryTags> dirichlet_u,
    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> dirichlet_v,
    TimeVectorField f_solid, TimeVectorField f_fluid, ViscousForm viscous_form,
    PressureGauge gauge, double dt, int n_steps) {
    std::vector<BoundaryTag> tags_u, tags_v;
    for (int tag = 0; tag < kNumBoundaryTags; ++tag) {
        if (dirichlet_u[tag])
            tags_u.push_back(static_cast<BoundaryTag>(tag));
        if (dirichlet_v[tag])
            tags_v.push_back(static_cast<BoundaryTag>(tag));
    }
    ProblemSetup setup{
        .mesh = mesh,
        .dof_u = build_dof_map(mesh, ElementKind::q2, 2),
        .dof_v = build_dof_map(mesh, ElementKind::q2, 2),
        .dof_p = build_dof_map(mesh, ElementKind::q1, 1),
        .dirichlet_u = std::move(dirichlet_u),
        .dirichlet_v = std::move(dirichlet_v),
        .f_solid = std::move(f_solid),
        .f_fluid = std::move(f_fluid),
        .viscous_form = viscous_form,
        .pressure_gauge = gauge,
        .dt = dt,
        .n_steps = n_steps,
    };
    setup.dof_u.mark_dirichlet(setup.mesh, tags_u);
    setup.dof_v.mark_dirichlet(setup.mesh, tags_v);
    setup.validate();
    return setup;
}

SystemState interpolate_initial(const ProblemSetup& setup, const VectorField& u0,
                                const VectorField& v0) {
    SystemState state;
    state.step = 0;
    state.time = 0.0;
    state.u = u0 ? nodal_interpolate(u0, setup.dof_u) : Vector::Zero(setup.n_dofs_u());
    state.v = v0 ? nodal_interpolate(v0, setup.dof_v) : Vector::Zero(setup.n_dofs_v());
    state.p = Vector::Zero(setup.n_dofs_p());
    return state;
}

StepAssembler::StepAssembler(const ProblemSetup& setup, const MaterialParams& params)
    : setup_(setup), params_(params) {
    off_u_ = 0;
    off_v_ = setup.n_dofs_u();
    off_p_ = off_v_ + setup.n_dofs_v();
    if (setup.pressure_gauge == PressureGauge::zero_mean)
        gauge_row_ = off_p_ + setup.n_dofs_p();
    build_tables();
    rhs_ = Vector::Zero(setup.n_system());
}

void StepAssembler::build_tables() {
    const QuadratureRule rule = gauss_rule(3);
    const FeTable tab_u = tabulate(setup_.dof_u, rule);
    const FeTable tab_p = tabulate(setup_.dof_p, rule);
    nq_ = rule.size();

    qweight_.assign(tab_u.weights.begin(), tab_u.weights.end());
    phi_u_ = tab_u.value;
    dphi_u_ = tab_u.grad;
    phi_p_ = tab_p.value;

    mass_loc_.setZero();
    visc_loc_.setZero();
    b_loc_.setZero();
    pw_loc_.setZero();
    for (int q = 0; q < nq_; ++q) {
        const double w = qweight_[q];
        for (int a = 0; a < 9; ++a) {
            const double pa = tab_u.val(q, a);
            const Eigen::Vector2d ga = tab_u.grd(q, a);
            for (int b = 0; b < 9; ++b) {
                const double pb = tab_u.val(q, b);
                const Eigen::Vector2d gb = tab_u.grd(q, b);
                const double m = w * pa * pb;
                const double k = w * ga.dot(gb);
                for (int c = 0; c < 2; ++c) {
                    mass_loc_(2 * a + c, 2 * b + c) += m;
                    if (setup_.viscous_form == ViscousForm::grad_grad) {
                        visc_loc_(2 * a + c, 2 * b + c) += k;
                    } else {
                        // 2 eps(v):eps(w) = delta_ce grad.grad + dphi_a[e] dphi_b[c]
                        for (int e = 0; e < 2; ++e) {
                            const double v2 =
                                w * ((c == e ? ga.dot(gb) : 0.0) + ga[e] * gb[c]);
                            visc_loc_(2 * a + c, 2 * b + e) += v2;
                        }
                    }
                }
            }
            for (int i = 0; i < kPreDofs; ++i) {
                const double np = tab_p.val(q, i);
                for (int c = 0; c < 2; ++c)
                    b_loc_(i, 2 * a + c) += w * np * ga[c];
            }
        }
        for (int i = 0; i < kPreDofs; ++i)
            pw_loc_(i) += w * tab_p.val(q, i);
    }
}

template <typename Emit>
void StepAssembler::assemble_cells(const SystemState& prev, double t, const Vector& bc,
                                   Emit&& emit) {
    const double alpha = params_.alpha;
    const double inv_dt = 1.0 / setup_.dt;
    const double abs_e2 = std::abs(params_.E2);
    const QuadratureRule rule = gauss_rule(3);

    min_shear_coeff_ = std::numeric_limits<double>::infinity();
    min_trace_factor_ = std::numeric_limits<double>::infinity();
    max_abs_div_prev_ = 0.0;

    rhs_.setZero();

    std::vector<int> nodes_u(9), nodes_p(4);
    Eigen::Matrix<double, kVecDofs, kVecDofs> k_loc;
    Eigen::Matrix<double, kVecDofs, 1> rhs_u_loc, rhs_v_loc, ul, vl;

    const int n_cells = setup_.dof_u.n_cells();
    for (int cell = 0; cell < n_cells; ++cell) {
        setup_.dof_u.cell_nodes(cell, nodes_u.data());
        setup_.dof_p.cell_nodes(cell, nodes_p.data());
        const auto points = cell_points(setup_.dof_u, cell, rule);

        for (int a = 0; a < 9; ++a)
            for (int c = 0; c < 2; ++c) {
                ul(2 * a + c) = prev.u[2 * nodes_u[a] + c];
                vl(2 * a + c) = prev.v[2 * nodes_u[a] + c];
            }

        k_loc.setZero();
        rhs_u_loc.setZero();
        rhs_v_loc.setZero();
        for (int q = 0; q < nq_; ++q) {
            const double w = qweight_[q];
            // previous-step fields at the quadrature point
            double div_prev = 0.0;
            Eigen::Vector2d u_prev = Eigen::Vector2d::Zero();
            Eigen::Vector2d v_prev = Eigen::Vector2d::Zero();
            for (int a = 0; a < 9; ++a) {
                const double pa = phi_u_[q * 9 + a];
                const Eigen::Vector2d& ga = dphi_u_[q * 9 + a];
                div_prev += ga.x() * ul(2 * a) + ga.y() * ul(2 * a + 1);
                u_prev += pa * Eigen::Vector2d(ul(2 * a), ul(2 * a + 1));
                v_prev += pa * Eigen::Vector2d(vl(2 * a), vl(2 * a + 1));
            }

            // frozen constitutive coefficients, with positivity check
            const double trunc = truncate(div_prev, params_.delta);
            const double shear_den = 1.0 + params_.lambda1 * trunc;
            const double f_val = trace_factor(trunc, params_);
            min_shear_coeff_ = std::min(min_shear_coeff_, shear_den);
            min_trace_factor_ = std::min(min_trace_factor_, f_val);
            max_abs_div_prev_ = std::max(max_abs_div_prev_, std::abs(div_prev));
            if (shear_den <= 0.0 || f_val <= 0.0)
                throw PositivityError(
                    "assemble_step: constitutive coefficient lost positivity in cell " +
                    std::to_string(cell) + " (div u_prev = " + std::to_string(div_prev) +
                    ", 1+lambda1*T = " + std::to_string(shear_den) +
                    ", F = " + std::to_string(f_val) + ")");
            const double b1 = 1.0 / shear_den;
            const double b2 = (1.0 + params_.lambda2 * trunc) / (shear_den * f_val);

            const double c_eps = w * b1 / params_.E1;
            const double c_div = w * abs_e2 * b2 / params_.E1;
            for (int a = 0; a < 9; ++a) {
                const Eigen::Vector2d& ga = dphi_u_[q * 9 + a];
                for (int b = 0; b < 9; ++b) {
                    const Eigen::Vector2d& gb = dphi_u_[q * 9 + b];
                    const double gg = ga.dot(gb);
                    for (int c = 0; c < 2; ++c)
                        for (int e = 0; e < 2; ++e) {
                            // eps(phi_a e_c) : eps(phi_b e_e)
                            const double eps =
                                0.5 * ((c == e ? gg : 0.0) + ga[e] * gb[c]);
                            k_loc(2 * a + c, 2 * b + e) +=
                                c_eps * eps + c_div * ga[c] * gb[e];
                        }
                }
            }

            // volumetric right-hand sides
            Eigen::Vector2d f_s = Eigen::Vector2d::Zero();
            Eigen::Vector2d f_f = Eigen::Vector2d::Zero();
            if (setup_.f_solid)
                f_s = setup_.f_solid(t, points[q]);
            if (setup_.f_fluid)
                f_f = setup_.f_fluid(t, points[q]);
            const Eigen::Vector2d su = alpha * inv_dt * u_prev + f_s;
            const Eigen::Vector2d sv =
                params_.rho * inv_dt * v_prev - alpha * inv_dt * u_prev + f_f;
            for (int a = 0; a < 9; ++a) {
                const double pa = w * phi_u_[q * 9 + a];
                for (int c = 0; c < 2; ++c) {
                    rhs_u_loc(2 * a + c) += pa * su[c];
                    rhs_v_loc(2 * a + c) += pa * sv[c];
                }
            }
        }

        // scatter with Dirichlet elimination
        const double m_uu = alpha * inv_dt;
        const double m_vv = params_.rho * inv_dt + alpha;
        for (int i = 0; i < kVecDofs; ++i) {
            const int gu_i = off_u_ + 2 * nodes_u[i / 2] + (i % 2);
            const int gv_i = off_v_ + 2 * nodes_u[i / 2] + (i % 2);
            for (int j = 0; j < kVecDofs; ++j) {
                const int gu_j = off_u_ + 2 * nodes_u[j / 2] + (j % 2);
                const int gv_j = off_v_ + 2 * nodes_u[j / 2] + (j % 2);
                emit(gu_i, gu_j, k_loc(i, j) + m_uu * mass_loc_(i, j));
                emit(gu_i, gv_j, -alpha * mass_loc_(i, j));
                emit(gv_i, gu_j, -alpha * inv_dt * mass_loc_(i, j));
                emit(gv_i, gv_j, m_vv * mass_loc_(i, j) + params_.nu * visc_loc_(i, j));
            }
            for (int k = 0; k < kPreDofs; ++k) {
                const int gp_k = off_p_ + nodes_p[k];
                emit(gv_i, gp_k, -b_loc_(k, i));
                emit(gp_k, gv_i, b_loc_(k, i));
            }
            rhs_[gu_i] += setup_.dof_u.is_constrained_dof(gu_i - off_u_) ? 0.0 : rhs_u_loc(i);
            rhs_[gv_i] +=
                setup_.dof_v.is_constrained_dof(gv_i - off_v_) ? 0.0 : rhs_v_loc(i);
        }
        if (gauge_row_ >= 0)
            for (int k = 0; k < kPreDofs; ++k) {
                const int gp_k = off_p_ + nodes_p[k];
                emit(gp_k, gauge_row_, pw_loc_(k));
                emit(gauge_row_, gp_k, pw_loc_(k));
            }
    }

}

void StepAssembler::assemble(const SystemState& prev, double t) {
    bc_ = setup_.boundary_values(t);
    const Vector& bc = bc_;
    const auto constrained = [&](int index) {
        if (index >= off_u_ && index < off_v_)
            return setup_.dof_u.is_constrained_dof(index - off_u_);
        if (index >= off_v_ && index < off_p_)
            return setup_.dof_v.is_constrained_dof(index - off_v_);
        return false;
    };

    // Dirichlet rows become identity with the prescribed value on the rhs;
    // set after the cell loop so no stiffness leaks onto them.
    const auto finish_constrained_rhs = [&] {
        for (int d = 0; d < setup_.n_dofs_u(); ++d)
            if (setup_.dof_u.is_constrained_dof(d))
                rhs_[off_u_ + d] = bc[off_u_ + d];
        for (int d = 0; d < setup_.n_dofs_v(); ++d)
            if (setup_.dof_v.is_constrained_dof(d))
                rhs_[off_v_ + d] = bc[off_v_ + d];
    };

    if (!pattern_built_) {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(setup_.dof_u.n_cells()) * 1560 +
                         setup_.n_system());
        assemble_cells(prev, t, bc, [&](int row, int col, double val) {
            if (constrained(row))
                return;
            if (constrained(col)) {
                rhs_[row] -= val * bc[col];
                return;
            }
            triplets.emplace_back(row, col, val);
        });
        for (int d = 0; d < setup_.n_system(); ++d)
            if (constrained(d))
                triplets.emplace_back(d, d, 1.0);
        finish_constrained_rhs();
        matrix_.resize(setup_.n_system(), setup_.n_system());
        matrix_.setFromTriplets(triplets.begin(), triplets.end());
        matrix_.makeCompressed();
        pattern_built_ = true;
        return;
    }

    std::fill(matrix_.valuePtr(), matrix_.valuePtr() + matrix_.nonZeros(), 0.0);
    assemble_cells(prev, t, bc, [&](int row, int col, double val) {
        if (constrained(row))
            return;
        if (constrained(col)) {
            rhs_[row] -= val * bc[col];
            return;
        }
        matrix_.coeffRef(row, col) += val;
    });
    for (int d = 0; d < setup_.n_system(); ++d)
        if (constrained(d))
            matrix_.coeffRef(d, d) = 1.0;
    finish_constrained_rhs();
}

std::pair<SparseMatrix, Vector> assemble_step(const SystemState& prev,
                                              const ProblemSetup& setup,
                                              const MaterialParams& params, double t) {
    StepAssembler assembler(setup, params);
    assembler.assemble(prev, t);
    return {assembler.matrix(), assembler.rhs()};
}

Vector pack_state(const ProblemSetup& setup, const SystemState& state) {
    Vector x(setup.n_system());
    x.head(setup.n_dofs_u()) = state.u;
    x.segment(setup.n_dofs_u(), setup.n_dofs_v()) = state.v;
    x.segment(setup.n_dofs_u() + setup.n_dofs_v(), setup.n_dofs_p()) = state.p;
    if (setup.pressure_gauge == PressureGauge::zero_mean)
        x[setup.n_system() - 1] = state.gauge_multiplier;
    return x;
}

} // namespace porofem
