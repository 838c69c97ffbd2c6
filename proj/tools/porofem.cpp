// Command-line driver: single runs, convergence studies, the practical
// settlement problem, and material-parameter validation.

#include <cstdio>
#include <cstdlib>
#include <future>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "porofem/config.hpp"
#include "porofem/csv.hpp"
#include "porofem/experiments.hpp"
#include "porofem/vtu.hpp"

namespace {

using namespace porofem;

std::vector<std::pair<int, int>> parse_rows(const std::string& spec) {
    std::vector<std::pair<int, int>> rows;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        const std::size_t comma = spec.find(',', pos);
        const std::string item = spec.substr(pos, comma - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--rows", "expected m:N pairs, got '" + item + "'");
        rows.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
        pos = comma == std::string::npos ? spec.size() : comma + 1;
    }
    if (rows.empty())
        throw CLI::ValidationError("--rows", "no rows given");
    return rows;
}

ThetaKind parse_theta(const std::string& name) {
    if (name == "exp")
        return ThetaKind::exp_decay;
    if (name == "sin")
        return ThetaKind::sine;
    throw CLI::ValidationError("--theta", "expected exp or sin");
}

int cmd_run(const std::string& config_path) {
    const RunConfig config = load_config(config_path);
    std::filesystem::create_directories(config.output_dir);
    const ProblemSetup setup = make_setup(config);
    const SystemState initial = make_initial_state(config, setup);

    TimeLoopCallbacks callbacks;
    if (config.vtu_every > 0) {
        callbacks.on_step = [&](const SystemState& state, const StepDiagnostics&) {
            if (state.step % config.vtu_every == 0 || state.step == config.n_steps) {
                char name[64];
                std::snprintf(name, sizeof(name), "fields_%04d.vtu", state.step);
                export_vtu(state, setup, config.output_dir + "/" + name);
            }
        };
    }

    const TimeLoopResult result = time_loop(setup, config.material, initial, callbacks,
                                            &std::cerr);
    write_diagnostics_csv(result.diagnostics, setup.dt,
                          config.output_dir + "/diagnostics.csv");

    if (config.problem == ProblemKind::manufactured) {
        const ManufacturedCase mcase{config.theta_kind, config.material};
        ErrorReport report;
        report.theta_kind = config.theta_kind;
        ConvergenceRow row;
        row.m = config.m;
        row.n_steps = config.n_steps;
        row.errors = error_metrics(result.history, mcase, setup);
        row.ok = true;
        report.rows.push_back(row);
        write_error_report_csv(report, config.output_dir + "/errors.csv");
        std::cout << "errors: u_h01=" << csv_number(row.errors.u_h01)
                  << " u_l2=" << csv_number(row.errors.u_l2)
                  << " v_h01=" << csv_number(row.errors.v_h01)
                  << " v_l2=" << csv_number(row.errors.v_l2)
                  << " p_l2=" << csv_number(row.errors.p_l2) << "\n";
    }
    std::cout << "run complete: " << config.n_steps << " steps, outputs in "
              << config.output_dir << "\n";
    return 0;
}

int cmd_converge(const std::string& theta_name, const std::string& rows_spec, bool coupled,
                 const std::string& out_dir, int jobs) {
    ConvergenceConfig config;
    config.theta_kind = parse_theta(theta_name);
    config.jobs = jobs;
    if (coupled) {
        for (int m = 4; m <= 6; ++m)
            config.rows.emplace_back(m, coupled_step_count(m));
    } else {
        config.rows = parse_rows(rows_spec);
    }

    const ErrorReport report = convergence_study(config);
    std::filesystem::create_directories(out_dir);
    write_error_report_csv(report, out_dir + "/errors.csv");
    write_rates_csv(report, out_dir + "/rates.csv");

    bool all_ok = true;
    for (const ConvergenceRow& row : report.rows) {
        if (row.ok) {
            std::cout << "m=" << row.m << " N=" << row.n_steps
                      << " err_u_h01=" << csv_number(row.errors.u_h01)
                      << " err_v_h01=" << csv_number(row.errors.v_h01)
                      << " err_p_l2=" << csv_number(row.errors.p_l2) << "\n";
        } else {
            std::cout << "m=" << row.m << " N=" << row.n_steps << " FAILED: " << row.message
                      << "\n";
            all_ok = false;
        }
    }
    std::cout << "report written to " << out_dir << "/errors.csv\n";
    return all_ok ? 0 : 1;
}

int cmd_practical(const std::vector<double>& lambdas, const std::string& out_dir,
                  const std::string& viscous_name, bool write_fields, int jobs) {
    std::filesystem::create_directories(out_dir);
    const ViscousForm form =
        viscous_name == "grad_grad" ? ViscousForm::grad_grad : ViscousForm::sym_grad;

    std::vector<PracticalResult> results(lambdas.size());
    const auto run_one = [&](std::size_t i) {
        PracticalConfig config;
        config.lambda = lambdas[i];
        config.viscous_form = form;
        results[i] = practical_problem(config);
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            run_one(i);
    } else {
        std::vector<std::future<void>> inflight;
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            if (inflight.size() >= static_cast<std::size_t>(jobs)) {
                inflight.front().get();
                inflight.erase(inflight.begin());
            }
            inflight.push_back(std::async(std::launch::async, run_one, i));
        }
        for (auto& f : inflight)
            f.get();
    }

    std::vector<std::vector<double>> series;
    for (const PracticalResult& r : results)
        series.push_back(r.strain_linf);
    write_strain_csv(results.front().times, lambdas, series, out_dir + "/strain_linf.csv");

    for (std::size_t i = 0; i < results.size(); ++i) {
        std::cout << "lambda=" << lambdas[i]
                  << " strain_linf(T)=" << csv_number(results[i].strain_linf.back()) << "\n";
        if (write_fields) {
            char name[64];
            std::snprintf(name, sizeof(name), "fields_lambda%g.vtu", lambdas[i]);
            const ProblemSetup setup =
                make_practical_setup(results[i].config, results[i].params);
            export_vtu(results[i].loop.final_state(), setup, out_dir + "/" + name);
        }
    }
    std::cout << "strain history written to " << out_dir << "/strain_linf.csv\n";
    return 0;
}

int cmd_validate_params(const MaterialParams& params) {
    const GammaConstants g = gamma_constants(params);
    std::printf("sign conditions (E1>0, E2<0, E1-d|E2|>0): %s\n",
                params.sign_conditions_hold() ? "ok" : "VIOLATED");
    std::printf("gamma1=%.6g gamma2=%.6g\n", g.gamma1, g.gamma2);
    std::printf("gamma3=%.6g gamma4=%.6g\n", g.gamma3, g.gamma4);
    std::printf("gamma5=%.6g gamma6=%.6g\n", g.gamma5, g.gamma6);
    std::printf("gamma7=%.6g gamma8=%.6g\n", g.gamma7, g.gamma8);
    std::printf("admissible=%s\n", g.admissible ? "true" : "false");
    if (!g.admissible)
        std::printf("note: inadmissible parameters are allowed at runtime; coefficient "
                    "positivity is then checked pointwise during assembly\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    setenv("OMP_NUM_THREADS", "1", 0);

    CLI::App app{"Finite-element solver for slow flow through a deformable porous "
                 "medium with a nonlinear strain-stress law"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "Run one simulation from a config file");
    run->add_option("--config", config_path, "JSON configuration file")->required();

    std::string theta_name = "exp";
    std::string rows_spec;
    std::string out_dir = "out";
    bool coupled = false;
    int jobs = 1;
    CLI::App* converge =
        app.add_subcommand("converge", "Manufactured-solution convergence study");
    converge->add_option("--theta", theta_name, "time factor: exp or sin");
    converge->add_option("--rows", rows_spec, "comma-separated m:N pairs, e.g. 4:10,5:40");
    converge->add_flag("--coupled", coupled, "use the dt = 12.8 h^2 rows m=4,5,6");
    converge->add_option("--out", out_dir, "output directory");
    converge->add_option("--jobs", jobs, "concurrent rows");

    std::vector<double> lambdas{0, 1, 2, 3, 4, 5};
    std::string viscous_name = "sym_grad";
    bool write_fields = false;
    CLI::App* practical =
        app.add_subcommand("practical", "Settlement problem strain study");
    practical->add_option("--lambdas", lambdas, "lambda1=lambda2 values");
    practical->add_option("--out", out_dir, "output directory");
    practical->add_option("--viscous", viscous_name, "viscous form: sym_grad or grad_grad")
        ->check(CLI::IsMember({"sym_grad", "grad_grad"}));
    practical->add_flag("--vtu", write_fields, "export final fields per lambda");
    practical->add_option("--jobs", jobs, "concurrent lambda runs");

    MaterialParams vp;
    CLI::App* validate =
        app.add_subcommand("validate-params", "Print the gamma constants and admissibility");
    validate->add_option("--alpha", vp.alpha);
    validate->add_option("--nu", vp.nu);
    validate->add_option("--rho", vp.rho);
    validate->add_option("--E1", vp.E1);
    validate->add_option("--E2", vp.E2);
    validate->add_option("--lambda1", vp.lambda1);
    validate->add_option("--lambda2", vp.lambda2);
    validate->add_option("--delta", vp.delta);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run)
            return cmd_run(config_path);
        if (*converge) {
            if (!coupled && rows_spec.empty()) {
                std::cerr << "converge: either --rows or --coupled is required\n";
                return 2;
            }
            return cmd_converge(theta_name, rows_spec, coupled, out_dir, jobs);
        }
        if (*practical)
            return cmd_practical(lambdas, out_dir, viscous_name, write_fields, jobs);
        if (*validate)
            return cmd_validate_params(vp);
    } catch (const ConfigError& ex) {
        std::cerr << ex.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& ex) {
        std::cerr << ex.what() << "\n";
        return 2;
    } catch (const PositivityError& ex) {
        std::cerr << "constitutive failure: " << ex.what() << "\n";
        return 1;
    } catch (const SolverError& ex) {
        std::cerr << "solver failure: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
