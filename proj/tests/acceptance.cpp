// Acceptance gate: reproduces the published convergence tables, the rate
// table under the coupled step rule, and the settlement strain study, and
// runs the model-level property suite. One pass/fail line per criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "porofem/assembly.hpp"
#include "porofem/csv.hpp"
#include "porofem/experiments.hpp"
#include "porofem/fe_tables.hpp"
#include "porofem/manufactured.hpp"
#include "porofem/norms.hpp"
#include "porofem/solver.hpp"

using namespace porofem;

namespace {

struct CriterionResult {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty())
            detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty())
            detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4e", v);
    return buffer;
}

// ---------------------------------------------------------------------------
// Reference values (errors of the published convergence studies)
// ---------------------------------------------------------------------------

struct TableRow {
    int m;
    int n_steps;
    double u_h01, u_l2, v_h01, v_l2, p_l2;
};

const TableRow kTable1[] = {
    {4, 10, 3.8349e-4, 4.3634e-5, 2.2632e-2, 3.6360e-4, 9.0339e-3},
    {4, 40, 2.4809e-4, 1.1592e-5, 2.3446e-2, 3.3820e-4, 9.2753e-3},
    {4, 80, 2.3975e-4, 6.6330e-6, 2.3590e-2, 3.4215e-4, 9.3277e-3},
    {5, 10, 3.1494e-4, 4.3485e-5, 5.9192e-3, 2.1187e-4, 2.6269e-3},
    {5, 40, 9.9120e-5, 1.1055e-5, 5.8790e-3, 6.7737e-5, 2.3428e-3},
    {5, 80, 7.1384e-5, 5.6575e-6, 5.9028e-3, 4.9307e-5, 2.3372e-3},
    {6, 10, 3.1017e-4, 4.3481e-5, 2.2807e-3, 2.0976e-4, 1.4950e-3},
    {6, 40, 8.1244e-5, 1.1044e-5, 1.5342e-3, 5.6185e-5, 6.7734e-4},
    {6, 80, 4.2785e-5, 5.6385e-6, 1.4922e-3, 2.8774e-5, 6.0866e-4},
};

const TableRow kTable2[] = {
    {4, 20, 1.9051e-3, 2.4200e-4, 8.9573e-2, 1.0454e-2, 6.7303e-2},
    {4, 80, 5.4559e-4, 6.4431e-5, 3.3581e-2, 2.7066e-3, 1.9610e-2},
    {4, 160, 3.5286e-4, 3.2828e-5, 2.7770e-2, 1.4023e-3, 1.3124e-2},
    {5, 20, 1.8875e-3, 2.4169e-4, 8.6103e-2, 1.0423e-2, 6.6642e-2},
    {5, 80, 4.8442e-4, 6.4032e-5, 2.2736e-2, 2.6595e-3, 1.7058e-2},
    {5, 160, 2.4960e-4, 3.2359e-5, 1.2661e-2, 1.3342e-3, 8.8157e-3},
    {6, 20, 1.8864e-3, 2.4167e-4, 8.5881e-2, 1.0421e-2, 6.6600e-2},
    {6, 80, 4.8035e-4, 6.4010e-5, 2.1880e-2, 2.6575e-3, 1.6886e-2},
    {6, 160, 2.4170e-4, 3.2336e-5, 1.1051e-2, 1.3319e-3, 8.4743e-3},
};

// Convergence rates under dt = 12.8 h^2, per theta: {m4->5, m5->6} for the
// u_h01, v_h01, p_l2 columns.
const double kRatesTheta1[2][3] = {{1.952, 1.945, 1.947}, {1.988, 1.986, 1.987}};
const double kRatesTheta2[2][3] = {{1.981, 1.942, 1.948}, {1.982, 1.990, 1.992}};

// Strain table of the settlement problem: rows t = 0.1..1.0, columns
// lambda = 0..5.
const double kStrainTimes[] = {0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
const double kStrainTable[6][6] = {
    {1.15251, 1.15251, 1.15251, 1.15251, 1.15251, 1.15251},
    {1.10503, 1.09503, 1.10053, 1.09282, 1.07514, 1.07498},
    {1.10344, 1.07718, 1.07858, 1.10469, 1.21638, 1.32958},
    {1.10361, 1.07726, 1.07899, 1.22575, 1.42431, 1.63958},
    {1.10371, 1.07728, 1.07912, 1.30193, 1.58267, 1.90757},
    {1.10375, 1.07728, 1.08778, 1.35043, 1.70443, 2.14054},
};

bool within(double value, double reference, double tolerance) {
    return std::abs(value - reference) <= tolerance * std::abs(reference);
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2: error tables within 5% relative
// ---------------------------------------------------------------------------

CriterionResult check_error_table(ThetaKind theta, const TableRow* rows, int n_rows) {
    CriterionResult result;
    ConvergenceConfig config;
    config.theta_kind = theta;
    config.jobs = 2;
    for (int i = 0; i < n_rows; ++i)
        config.rows.emplace_back(rows[i].m, rows[i].n_steps);

    const ErrorReport report = convergence_study(config);
    for (int i = 0; i < n_rows; ++i) {
        const ConvergenceRow& row = report.rows[i];
        const TableRow& ref = rows[i];
        const std::string tag = "m=" + std::to_string(ref.m) + ",N=" + std::to_string(ref.n_steps);
        if (!row.ok) {
            result.fail(tag + " failed: " + row.message);
            continue;
        }
        const std::pair<double, double> checks[] = {
            {row.errors.u_h01, ref.u_h01}, {row.errors.u_l2, ref.u_l2},
            {row.errors.v_h01, ref.v_h01}, {row.errors.v_l2, ref.v_l2},
            {row.errors.p_l2, ref.p_l2}};
        const char* names[] = {"u_h01", "u_l2", "v_h01", "v_l2", "p_l2"};
        for (int k = 0; k < 5; ++k)
            if (!within(checks[k].first, checks[k].second, 0.05))
                result.fail(tag + " " + names[k] + "=" + fmt(checks[k].first) +
                            " vs " + fmt(checks[k].second));
    }
    if (result.pass)
        result.note(std::to_string(n_rows) + " rows, all five norms within 5%");
    return result;
}

CriterionResult criterion_1() {
    return check_error_table(ThetaKind::exp_decay, kTable1, 9);
}

CriterionResult criterion_2() {
    return check_error_table(ThetaKind::sine, kTable2, 9);
}

// ---------------------------------------------------------------------------
// Criterion 3: convergence rates under dt = 12.8 h^2 within +-0.10
// ---------------------------------------------------------------------------

CriterionResult criterion_3() {
    CriterionResult result;
    const struct {
        ThetaKind theta;
        const double (*rates)[3];
        const char* name;
    } cases[] = {{ThetaKind::exp_decay, kRatesTheta1, "theta1"},
                 {ThetaKind::sine, kRatesTheta2, "theta2"}};

    for (const auto& c : cases) {
        ConvergenceConfig config;
        config.theta_kind = c.theta;
        config.jobs = 2;
        for (int m = 4; m <= 6; ++m)
            config.rows.emplace_back(m, coupled_step_count(m));
        const ErrorReport report = convergence_study(config);
        for (const ConvergenceRow& row : report.rows)
            if (!row.ok)
                result.fail(std::string(c.name) + " m=" + std::to_string(row.m) +
                            " failed: " + row.message);
        if (report.rates.size() != 2) {
            result.fail(std::string(c.name) + ": expected 2 rate rows, got " +
                        std::to_string(report.rates.size()));
            continue;
        }
        for (int level = 0; level < 2; ++level) {
            const RateRow& r = report.rates[level];
            const std::optional<double> got[3] = {r.u_h01, r.v_h01, r.p_l2};
            const char* names[3] = {"u_h01", "v_h01", "p_l2"};
            for (int k = 0; k < 3; ++k) {
                if (!got[k]) {
                    result.fail(std::string(c.name) + " rate " + names[k] + " undefined");
                    continue;
                }
                if (std::abs(*got[k] - c.rates[level][k]) > 0.10)
                    result.fail(std::string(c.name) + " m" + std::to_string(4 + level) +
                                "->" + std::to_string(5 + level) + " " + names[k] +
                                " rate " + fmt(*got[k]) + " vs " + fmt(c.rates[level][k]));
            }
        }
    }
    if (result.pass)
        result.note("all 12 rates within +-0.10 of the reference");
    return result;
}

// ---------------------------------------------------------------------------
// Criterion 4: settlement strain table within 5% (or the two-form 10% rule)
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> run_strain_study(ViscousForm form) {
    std::vector<std::vector<double>> series(6);
    std::vector<std::future<void>> inflight;
    for (int lambda = 0; lambda < 6; ++lambda) {
        if (inflight.size() >= 2) {
            inflight.front().get();
            inflight.erase(inflight.begin());
        }
        inflight.push_back(std::async(std::launch::async, [&series, lambda, form] {
            PracticalConfig config;
            config.lambda = lambda;
            config.viscous_form = form;
            series[lambda] = practical_problem(config).strain_linf;
        }));
    }
    for (auto& f : inflight)
        f.get();
    return series;
}

int strain_mismatches(const std::vector<std::vector<double>>& series, double tolerance,
                      std::string* worst) {
    int mismatches = 0;
    double worst_dev = 0.0;
    for (int lambda = 0; lambda < 6; ++lambda) {
        for (int row = 0; row < 6; ++row) {
            const int step = static_cast<int>(std::lround(kStrainTimes[row] / 0.1));
            const double value = series[lambda].at(step - 1);
            const double reference = kStrainTable[row][lambda];
            const double deviation = std::abs(value - reference) / reference;
            if (deviation > tolerance)
                ++mismatches;
            if (deviation > worst_dev) {
                worst_dev = deviation;
                if (worst)
                    *worst = "lambda=" + std::to_string(lambda) +
                             " t=" + fmt(kStrainTimes[row]) + " got " + fmt(value) +
                             " vs " + fmt(reference) + " (" + fmt(deviation * 100) + "%)";
            }
        }
    }
    return mismatches;
}

CriterionResult criterion_4() {
    CriterionResult result;
    const auto sym_series = run_strain_study(ViscousForm::sym_grad);

    std::string worst;
    const int sym_bad = strain_mismatches(sym_series, 0.05, &worst);
    const double ratio = sym_series[5].back() / sym_series[0].back();

    if (sym_bad == 0) {
        result.note("sym_grad form matches all 36 entries within 5%; worst " + worst);
    } else {
        // fallback rule: run both forms, one must reach 10% agreement
        result.note("sym_grad misses 5% on " + std::to_string(sym_bad) +
                    " entries (worst " + worst + ")");
        const auto grad_series = run_strain_study(ViscousForm::grad_grad);
        const int sym_bad10 = strain_mismatches(sym_series, 0.10, nullptr);
        const int grad_bad10 = strain_mismatches(grad_series, 0.10, nullptr);
        if (sym_bad10 == 0)
            result.note("sym_grad achieves 10% agreement");
        else if (grad_bad10 == 0)
            result.note("grad_grad achieves 10% agreement");
        else
            result.fail("neither viscous form reaches 10% agreement (sym_grad misses " +
                        std::to_string(sym_bad10) + ", grad_grad misses " +
                        std::to_string(grad_bad10) + ")");
    }

    if (ratio <= 1.9)
        result.fail("final-time strain ratio lambda5/lambda0 = " + fmt(ratio) + " <= 1.9");
    else
        result.note("lambda5/lambda0 final ratio " + fmt(ratio));
    return result;
}

// ---------------------------------------------------------------------------
// Criterion 5: property suite
// ---------------------------------------------------------------------------

CriterionResult criterion_5() {
    CriterionResult result;
    std::mt19937 rng(20250809);

    // truncation Lipschitz inequality on 1e5 random triples
    {
        std::uniform_real_distribution<double> value(-5.0, 5.0);
        std::uniform_real_distribution<double> radius(1e-3, 3.0);
        int violations = 0;
        for (int k = 0; k < 100000; ++k) {
            const double a = value(rng), b = value(rng), r = radius(rng);
            if (std::abs(truncate(a + b, r) - truncate(a, r)) >
                std::abs(truncate(b, 2.0 * r)) + 1e-15)
                ++violations;
        }
        if (violations > 0)
            result.fail("truncation Lipschitz violated " + std::to_string(violations) +
                        " times");
    }

    // admissibility implies positivity of the frozen coefficients
    {
        std::uniform_real_distribution<double> lambda_dist(-1.5, 1.5);
        std::uniform_real_distribution<double> s_dist(-100.0, 100.0);
        int samples = 0, failures = 0;
        while (samples < 25) {
            MaterialParams params = manufactured_params();
            params.lambda1 = lambda_dist(rng);
            params.lambda2 = lambda_dist(rng);
            if (!gamma_constants(params).admissible)
                continue;
            ++samples;
            for (int k = 0; k < 10000; ++k) {
                try {
                    const StepCoefficients c = step_coefficients(s_dist(rng), params);
                    if (!(c.b1 > 0.0) || !(c.b2 > 0.0))
                        ++failures;
                } catch (const PositivityError&) {
                    ++failures;
                }
            }
        }
        if (failures > 0)
            result.fail("coefficient positivity failed " + std::to_string(failures) +
                        " times under admissible parameters");
    }

    // zero-data uniqueness on the m=2 mesh for 20 random admissible sets
    {
        const TimeVectorField zero = [](double, const Eigen::Vector2d&) {
            return Eigen::Vector2d::Zero().eval();
        };
        std::array<std::optional<TimeVectorField>, kNumBoundaryTags> bc;
        for (int tag = 0; tag < kNumBoundaryTags; ++tag)
            bc[tag] = zero;
        const ProblemSetup setup =
            make_problem_setup(build_unit_square_mesh(2), bc, bc, {}, {},
                               ViscousForm::grad_grad, PressureGauge::zero_mean, 0.1, 1);
        const SystemState zero_state = interpolate_initial(setup, {}, {});
        std::uniform_real_distribution<double> lambda_dist(-1.2, 1.2);
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
            const double magnitude =
                std::max({next.u.lpNorm<Eigen::Infinity>(), next.v.lpNorm<Eigen::Infinity>(),
                          next.p.lpNorm<Eigen::Infinity>()});
            if (magnitude > 1e-10)
                result.fail("zero-data step is nonzero: " + fmt(magnitude));
        }
    }

    // residual and manufactured invariants along full runs
    for (ThetaKind theta : {ThetaKind::exp_decay, ThetaKind::sine}) {
        const ManufacturedCase mcase = make_manufactured_case(theta);
        const ProblemSetup setup = make_manufactured_setup(mcase, 3, 8);
        const SystemState initial = manufactured_initial(mcase, setup);
        const TimeLoopResult run = time_loop(setup, mcase.params, initial);
        for (std::size_t n = 1; n < run.history.size(); ++n) {
            const double res =
                residual_check(run.history[n], run.history[n - 1], setup, mcase.params);
            if (res > 1e-9)
                result.fail("step residual " + fmt(res) + " above 1e-9");
            const StepDiagnostics& diag = run.diagnostics[n - 1];
            if (!(diag.max_abs_div_prev < 0.4))
                result.fail("|div u_h| reached " + fmt(diag.max_abs_div_prev) +
                            ", truncation would activate");
            if (!(diag.min_shear_coeff > 0.0) || !(diag.min_trace_factor > 0.0))
                result.fail("coefficient positivity lost during a manufactured run");
            const FieldNormsSq nu = field_norms_sq(run.history[n].u, setup.dof_u, gauss_rule(3));
            if (!(nu.max_abs_div < 0.4))
                result.fail("final |div u_h| " + fmt(nu.max_abs_div) + " at step " +
                            std::to_string(n));
        }
    }

    // exact-solution invariants by quadrature: div v = 0 and mean(p) = 0
    {
        const ManufacturedCase mcase = make_manufactured_case(ThetaKind::exp_decay);
        const Mesh mesh = build_unit_square_mesh(4);
        const DofMap map = build_dof_map(mesh, ElementKind::q1, 1);
        const QuadratureRule rule = gauss_rule(5);
        const FeTable table = tabulate(map, rule);
        std::uniform_real_distribution<double> time(0.0, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            const double t = time(rng);
            double mean_p = 0.0, max_div = 0.0;
            for (int cell = 0; cell < map.n_cells(); ++cell) {
                const auto pts = cell_points(map, cell, rule);
                for (int q = 0; q < rule.size(); ++q) {
                    const ExactPoint e = exact_fields(mcase, t, pts[q]);
                    mean_p += table.weights[q] * e.p;
                    max_div = std::max(max_div, std::abs(e.grad_v.trace()));
                }
            }
            if (std::abs(mean_p) > 1e-12)
                result.fail("mean pressure " + fmt(mean_p) + " at t=" + fmt(t));
            if (max_div > 1e-12)
                result.fail("div v " + fmt(max_div) + " at t=" + fmt(t));
        }
    }

    // unforced homogeneous decay of the fluid energy
    {
        const TimeVectorField zero = [](double, const Eigen::Vector2d&) {
            return Eigen::Vector2d::Zero().eval();
        };
        std::array<std::optional<TimeVectorField>, kNumBoundaryTags> bc;
        for (int tag = 0; tag < kNumBoundaryTags; ++tag)
            bc[tag] = zero;
        const ProblemSetup setup =
            make_problem_setup(build_unit_square_mesh(3), bc, bc, {}, {},
                               ViscousForm::grad_grad, PressureGauge::zero_mean, 0.05, 10);
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        SystemState initial = interpolate_initial(setup, {}, {});
        for (int node = 0; node < setup.dof_v.n_nodes(); ++node)
            if (!setup.dof_v.is_constrained_node(node)) {
                initial.v[2 * node] = amp(rng);
                initial.v[2 * node + 1] = amp(rng);
            }
        for (int node = 0; node < setup.dof_u.n_nodes(); ++node)
            if (!setup.dof_u.is_constrained_node(node)) {
                initial.u[2 * node] = 0.01 * amp(rng);
                initial.u[2 * node + 1] = 0.01 * amp(rng);
            }
        const TimeLoopResult run = time_loop(setup, manufactured_params(), initial);
        double previous =
            std::sqrt(field_norms_sq(initial.v, setup.dof_v, gauss_rule(3)).l2);
        for (const StepDiagnostics& diag : run.diagnostics) {
            const double current = std::sqrt(diag.v_l2_sq);
            if (current > previous + 1e-10)
                result.fail("fluid energy grew: " + fmt(previous) + " -> " + fmt(current));
            previous = current;
        }
    }

    // second-order convergence of the stress-divergence oracle
    {
        const ManufacturedCase mcase = make_manufactured_case(ThetaKind::exp_decay);
        std::uniform_real_distribution<double> coord(0.0, 1.0);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::Vector2d x(coord(rng), coord(rng));
            const Eigen::Vector2d coarse = forcing_solid(mcase, 0.2, x, 2e-3);
            const Eigen::Vector2d mid = forcing_solid(mcase, 0.2, x, 1e-3);
            const Eigen::Vector2d fine = forcing_solid(mcase, 0.2, x, 5e-4);
            const double num = (coarse - mid).norm();
            const double den = (mid - fine).norm();
            if (den > 1e-13) {
                const double ratio = num / den;
                if (ratio < 3.5 || ratio > 4.5)
                    result.fail("fd oracle ratio " + fmt(ratio) + " not ~4");
            }
            const Eigen::Vector2d at_default = forcing_solid(mcase, 0.2, x, 1e-5);
            const Eigen::Vector2d at_half = forcing_solid(mcase, 0.2, x, 5e-6);
            if ((at_default - at_half).norm() > 1e-6 * std::max(1.0, at_default.norm()))
                result.fail("fd oracle not converged at the default step");
        }
    }

    if (result.pass)
        result.note("truncation, positivity, uniqueness, residuals, invariants, "
                    "dissipation, fd oracle all hold");
    return result;
}

// ---------------------------------------------------------------------------
// Criterion 6: byte-identical convergence CSVs across reruns
// ---------------------------------------------------------------------------

std::string file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CriterionResult criterion_6() {
    CriterionResult result;
    const auto dir = std::filesystem::temp_directory_path() / "porofem_acceptance_c6";
    std::filesystem::create_directories(dir);

    ConvergenceConfig config;
    config.theta_kind = ThetaKind::exp_decay;
    config.rows = {{3, 4}, {4, 10}};

    for (int repeat = 0; repeat < 2; ++repeat) {
        config.jobs = repeat == 0 ? 1 : 2; // schedule must not affect bytes
        const ErrorReport report = convergence_study(config);
        const auto errors = dir / ("errors_" + std::to_string(repeat) + ".csv");
        const auto rates = dir / ("rates_" + std::to_string(repeat) + ".csv");
        write_error_report_csv(report, errors.string());
        write_rates_csv(report, rates.string());
    }
    if (file_bytes(dir / "errors_0.csv") != file_bytes(dir / "errors_1.csv"))
        result.fail("errors.csv differs between reruns");
    if (file_bytes(dir / "rates_0.csv") != file_bytes(dir / "rates_1.csv"))
        result.fail("rates.csv differs between reruns");
    if (result.pass)
        result.note("errors.csv and rates.csv byte-identical across reruns and schedules");
    return result;
}

struct Criterion {
    int id;
    const char* name;
    CriterionResult (*run)();
};

const Criterion kCriteria[] = {
    {1, "convergence errors, exp(-t) factor (5% on all norms)", criterion_1},
    {2, "convergence errors, sin(3 pi t) factor (5% on all norms)", criterion_2},
    {3, "convergence rates under dt = 12.8 h^2 (+-0.10)", criterion_3},
    {4, "settlement strain history (5%) and nonlinear amplification", criterion_4},
    {5, "property suite", criterion_5},
    {6, "deterministic CSV output", criterion_6},
};

} // namespace

int main(int argc, char** argv) {
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);

    int selected = 0; // 0 = all
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion 1..6]\n", argv[0]);
            return 2;
        }
    }

    bool all_pass = true;
    for (const Criterion& criterion : kCriteria) {
        if (selected != 0 && criterion.id != selected)
            continue;
        CriterionResult result;
        try {
            result = criterion.run();
        } catch (const std::exception& ex) {
            result.pass = false;
            result.detail = std::string("exception: ") + ex.what();
        }
        std::printf("criterion %d (%s): %s%s%s\n", criterion.id, criterion.name,
                    result.pass ? "PASS" : "FAIL", result.detail.empty() ? "" : " -- ",
                    result.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && result.pass;
    }
    return all_pass ? 0 : 1;
}
