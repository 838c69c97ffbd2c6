#pragma once

#include <stdexcept>
#include <string>

#include "porofem/experiments.hpp"
#include "porofem/manufactured.hpp"

namespace porofem {

/// Raised on malformed configuration documents; the message carries the
/// offending key path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProblemKind { manufactured, practical };

/// One validated run description. Defaults depend on the problem kind and
/// reproduce the two experiment families (convergence study on the unit
/// square / settlement problem on the 2x1 strip).
struct RunConfig {
    ProblemKind problem = ProblemKind::manufactured;
    ThetaKind theta_kind = ThetaKind::exp_decay; // manufactured only
    int m = 4;                                    // manufactured refinement level
    int nx = 128, ny = 64;                        // practical mesh
    int n_steps = 10;
    double final_time = 1.0;
    MaterialParams material;
    ViscousForm viscous_form = ViscousForm::grad_grad;
    std::string output_dir = ".";
    int vtu_every = 0; // 0 = no field snapshots
    bool deterministic = true;

    double dt() const { return final_time / n_steps; }
};

/// Parses a JSON configuration document. The schema is strict: unknown keys,
/// type mismatches, and invariant violations raise ConfigError with the key
/// path. Omitted keys take the per-problem defaults.
RunConfig parse_config(const std::string& text);

/// Reads and parses a configuration file.
RunConfig load_config(const std::string& path);

/// Builders mapping a RunConfig onto the experiment modules.
ProblemSetup make_setup(const RunConfig& config);
SystemState make_initial_state(const RunConfig& config, const ProblemSetup& setup);

const char* to_string(ProblemKind kind);
const char* to_string(ThetaKind kind);
const char* to_string(ViscousForm form);

} // namespace porofem
