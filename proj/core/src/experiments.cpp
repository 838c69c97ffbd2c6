#include "porofem/experiments.hpp"

#include <cmath>
#include <future>
#include <vector>

#include "porofem/fe_tables.hpp"
#include "porofem/quadrature.hpp"

namespace porofem {

int coupled_step_count(int level, double final_time, double c) {
    const double h2 = 2.0 * std::pow(2.0, -2.0 * level);
    return static_cast<int>(std::lround(final_time / (c * h2)));
}

ErrorReport convergence_study(const ConvergenceConfig& config) {
    ErrorReport report;
    report.theta_kind = config.theta_kind;
    report.rows.resize(config.rows.size());

    const auto run_row = [&](std::size_t index) {
        const auto [m, n_steps] = config.rows[index];
        ConvergenceRow row;
        row.m = m;
        row.n_steps = n_steps;
        try {
            ManufacturedCase mcase{config.theta_kind, config.params};
            const ProblemSetup setup = make_manufactured_setup(
                mcase, m, n_steps, config.viscous_form, config.final_time);
            const SystemState initial = manufactured_initial(mcase, setup);
            const TimeLoopResult result = time_loop(setup, config.params, initial);
            row.errors = error_metrics(result.history, mcase, setup);
            row.ok = true;
        } catch (const std::exception& ex) {
            row.ok = false;
            row.message = ex.what();
        }
        report.rows[index] = std::move(row);
    };

    if (config.jobs <= 1) {
        for (std::size_t i = 0; i < config.rows.size(); ++i)
            run_row(i);
    } else {
        std::vector<std::future<void>> inflight;
        for (std::size_t i = 0; i < config.rows.size(); ++i) {
            if (inflight.size() >= static_cast<std::size_t>(config.jobs)) {
                inflight.front().get();
                inflight.erase(inflight.begin());
            }
            inflight.push_back(std::async(std::launch::async, run_row, i));
        }
        for (auto& f : inflight)
            f.get();
    }

    report.rates = compute_rates(report.rows);
    return report;
}

std::vector<RateRow> compute_rates(const std::vector<ConvergenceRow>& rows) {
    std::vector<RateRow> rates;
    const auto rate = [](double coarse, double fine) -> std::optional<double> {
        if (coarse <= 0.0 || fine <= 0.0)
            return std::nullopt;
        return std::log2(coarse / fine);
    };
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const ConvergenceRow& a = rows[i - 1];
        const ConvergenceRow& b = rows[i];
        if (!a.ok || !b.ok || b.m != a.m + 1)
            continue;
        RateRow r;
        r.m_coarse = a.m;
        r.m_fine = b.m;
        r.u_h01 = rate(a.errors.u_h01, b.errors.u_h01);
        r.v_h01 = rate(a.errors.v_h01, b.errors.v_h01);
        r.p_l2 = rate(a.errors.p_l2, b.errors.p_l2);
        rates.push_back(r);
    }
    return rates;
}

MaterialParams practical_params(double lambda) {
    MaterialParams p;
    p.alpha = 1.0;
    p.nu = 0.1;
    p.rho = 1.0;
    p.rho_s = 2.0;
    p.E1 = 0.125;
    p.E2 = -3.0 / 64.0;
    p.lambda1 = lambda;
    p.lambda2 = lambda;
    // Large enough that the clamp never engages for any lambda in 0..5; the
    // pointwise positivity check during assembly is the active safeguard.
    p.delta = 10.0;
    return p;
}

ProblemSetup make_practical_setup(const PracticalConfig& config,
                                  const MaterialParams& params) {
    Mesh mesh = build_rect_mesh(config.domain, config.nx, config.ny);

    const TimeVectorField zero = [](double, const Eigen::Vector2d&) {
        return Eigen::Vector2d::Zero().eval();
    };
    const TimeVectorField settlement = [](double, const Eigen::Vector2d& x) {
        return Eigen::Vector2d(0.0, -std::sin(0.5 * M_PI * x.x()));
    };

    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> bc_u;
    bc_u[static_cast<int>(BoundaryTag::bottom)] = settlement;
    bc_u[static_cast<int>(BoundaryTag::right)] = zero;
    bc_u[static_cast<int>(BoundaryTag::top)] = zero;
    bc_u[static_cast<int>(BoundaryTag::left)] = zero;

    std::array<std::optional<TimeVectorField>, kNumBoundaryTags> bc_v;
    bc_v[static_cast<int>(BoundaryTag::bottom)] = zero;
    bc_v[static_cast<int>(BoundaryTag::top)] = zero;
    // left/right stay traction-free: (2 nu eps(v) - p I) n = 0

    const double rho_s = params.rho_s;
    const double rho = params.rho;
    const int n_steps = static_cast<int>(std::lround(config.final_time / config.dt));
    return make_problem_setup(
        std::move(mesh), std::move(bc_u), std::move(bc_v),
        [rho_s](double, const Eigen::Vector2d&) { return Eigen::Vector2d(0.0, -rho_s); },
        [rho](double, const Eigen::Vector2d&) { return Eigen::Vector2d(0.0, -rho); },
        config.viscous_form, PressureGauge::none, config.dt, n_steps);
}

PracticalResult practical_problem(const PracticalConfig& config) {
    PracticalResult result;
    result.config = config;
    result.params = practical_params(config.lambda);

    const ProblemSetup setup = make_practical_setup(config, result.params);
    const SystemState initial = interpolate_initial(setup, {}, {});

    TimeLoopCallbacks callbacks;
    callbacks.on_step = [&](const SystemState& state, const StepDiagnostics&) {
        result.times.push_back(state.time);
        result.strain_linf.push_back(strain_linf(state.u, setup.dof_u));
    };
    result.loop = time_loop(setup, result.params, initial, callbacks);
    return result;
}

double strain_linf(const Vector& u_coeffs, const DofMap& dofmap) {
    // Fixed sample set: 3x3 Gauss points plus the element nodes.
    QuadratureRule samples = gauss_rule(3);
    const auto nodes = reference_nodes(dofmap.kind());
    for (int a = 0; a < dofmap.nodes_per_cell(); ++a) {
        samples.points.push_back(nodes[a]);
        samples.weights.push_back(0.0);
    }
    const FeTable table = tabulate(dofmap, samples);

    std::vector<int> cell_node_ids(dofmap.nodes_per_cell());
    double max_norm = 0.0;
    for (int cell = 0; cell < dofmap.n_cells(); ++cell) {
        dofmap.cell_nodes(cell, cell_node_ids.data());
        for (int q = 0; q < table.n_points; ++q) {
            Eigen::Vector2d g0 = Eigen::Vector2d::Zero();
            Eigen::Vector2d g1 = Eigen::Vector2d::Zero();
            for (int a = 0; a < table.n_nodes; ++a) {
                const Eigen::Vector2d& dphi = table.grd(q, a);
                g0 += u_coeffs[dofmap.dof_index(cell_node_ids[a], 0)] * dphi;
                g1 += u_coeffs[dofmap.dof_index(cell_node_ids[a], 1)] * dphi;
            }
            const double e01 = 0.5 * (g0.y() + g1.x());
            const double frob2 =
                g0.x() * g0.x() + g1.y() * g1.y() + 2.0 * e01 * e01;
            max_norm = std::max(max_norm, frob2);
        }
    }
    return std::sqrt(max_norm);
}

} // namespace porofem
