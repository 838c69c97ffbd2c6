#include "porofem/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace porofem {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void check_keys(const json& object, const std::string& path,
                const std::set<std::string>& allowed) {
    for (const auto& item : object.items())
        if (!allowed.contains(item.key()))
            fail(path + item.key(), "unknown key");
}

template <typename T>
T get_as(const json& object, const std::string& path, const char* key, T fallback) {
    if (!object.contains(key))
        return fallback;
    const json& value = object.at(key);
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        fail(path + key, "type mismatch");
    }
}

void apply_material(const json& object, const std::string& path, MaterialParams& m) {
    check_keys(object, path,
               {"alpha", "nu", "rho", "rho_s", "E1", "E2", "lambda1", "lambda2", "delta"});
    m.alpha = get_as(object, path, "alpha", m.alpha);
    m.nu = get_as(object, path, "nu", m.nu);
    m.rho = get_as(object, path, "rho", m.rho);
    m.rho_s = get_as(object, path, "rho_s", m.rho_s);
    m.E1 = get_as(object, path, "E1", m.E1);
    m.E2 = get_as(object, path, "E2", m.E2);
    m.lambda1 = get_as(object, path, "lambda1", m.lambda1);
    m.lambda2 = get_as(object, path, "lambda2", m.lambda2);
    m.delta = get_as(object, path, "delta", m.delta);
    if (m.alpha <= 0.0)
        fail(path + "alpha", "must be positive");
    if (m.nu <= 0.0)
        fail(path + "nu", "must be positive");
    if (m.rho <= 0.0)
        fail(path + "rho", "must be positive");
    if (m.delta <= 0.0)
        fail(path + "delta", "must be positive");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("config: invalid JSON: ") + ex.what());
    }
    if (!doc.is_object())
        throw ConfigError("config: document root must be an object");

    check_keys(doc, "", {"problem", "theta", "m", "nx", "ny", "N", "T", "material",
                         "viscous_form", "output_dir", "vtu_every", "deterministic"});

    RunConfig config;
    const std::string problem = get_as<std::string>(doc, "", "problem", "manufactured");
    if (problem == "manufactured") {
        config.problem = ProblemKind::manufactured;
        config.material = manufactured_params();
        config.viscous_form = ViscousForm::grad_grad;
        config.n_steps = 10;
    } else if (problem == "practical") {
        config.problem = ProblemKind::practical;
        config.material = practical_params(0.0);
        config.viscous_form = ViscousForm::sym_grad;
        config.n_steps = 10;
    } else {
        fail("problem", "expected \"manufactured\" or \"practical\"");
    }

    const std::string theta = get_as<std::string>(doc, "", "theta", "exp");
    if (theta == "exp")
        config.theta_kind = ThetaKind::exp_decay;
    else if (theta == "sin")
        config.theta_kind = ThetaKind::sine;
    else
        fail("theta", "expected \"exp\" or \"sin\"");

    config.m = get_as(doc, "", "m", config.m);
    config.nx = get_as(doc, "", "nx", config.nx);
    config.ny = get_as(doc, "", "ny", config.ny);
    config.n_steps = get_as(doc, "", "N", config.n_steps);
    config.final_time = get_as(doc, "", "T", config.final_time);
    if (doc.contains("material")) {
        if (!doc.at("material").is_object())
            fail("material", "type mismatch");
        apply_material(doc.at("material"), "material.", config.material);
    }

    const std::string viscous =
        get_as<std::string>(doc, "", "viscous_form",
                            config.viscous_form == ViscousForm::grad_grad ? "grad_grad"
                                                                          : "sym_grad");
    if (viscous == "grad_grad")
        config.viscous_form = ViscousForm::grad_grad;
    else if (viscous == "sym_grad")
        config.viscous_form = ViscousForm::sym_grad;
    else
        fail("viscous_form", "expected \"grad_grad\" or \"sym_grad\"");

    config.output_dir = get_as<std::string>(doc, "", "output_dir", config.output_dir);
    config.vtu_every = get_as(doc, "", "vtu_every", config.vtu_every);
    config.deterministic = get_as(doc, "", "deterministic", config.deterministic);

    if (config.m < 1 || config.m > 12)
        fail("m", "refinement level out of range 1..12");
    if (config.nx < 1 || config.ny < 1)
        fail("nx", "cell counts must be positive");
    if (config.n_steps < 1)
        fail("N", "step count must be positive");
    if (config.final_time <= 0.0)
        fail("T", "final time must be positive");
    if (config.vtu_every < 0)
        fail("vtu_every", "must be nonnegative");
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

ProblemSetup make_setup(const RunConfig& config) {
    if (config.problem == ProblemKind::manufactured) {
        const ManufacturedCase mcase{config.theta_kind, config.material};
        return make_manufactured_setup(mcase, config.m, config.n_steps, config.viscous_form,
                                       config.final_time);
    }
    PracticalConfig practical;
    practical.nx = config.nx;
    practical.ny = config.ny;
    practical.dt = config.dt();
    practical.final_time = config.final_time;
    practical.lambda = config.material.lambda1;
    practical.viscous_form = config.viscous_form;
    return make_practical_setup(practical, config.material);
}

SystemState make_initial_state(const RunConfig& config, const ProblemSetup& setup) {
    if (config.problem == ProblemKind::manufactured) {
        const ManufacturedCase mcase{config.theta_kind, config.material};
        return manufactured_initial(mcase, setup);
    }
    return interpolate_initial(setup, {}, {});
}

const char* to_string(ProblemKind kind) {
    return kind == ProblemKind::manufactured ? "manufactured" : "practical";
}

const char* to_string(ThetaKind kind) {
    return kind == ThetaKind::exp_decay ? "exp" : "sin";
}

const char* to_string(ViscousForm form) {
    return form == ViscousForm::grad_grad ? "grad_grad" : "sym_grad";
}

} // namespace porofem
