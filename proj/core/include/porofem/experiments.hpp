#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "porofem/manufactured.hpp"
#include "porofem/problem.hpp"
#include "porofem/solver.hpp"

namespace porofem {

/// Refinement/step pairs of a manufactured convergence study.
struct ConvergenceConfig {
    ThetaKind theta_kind = ThetaKind::exp_decay;
    /// (m, N) rows; the coupled rule dt = 12.8 h^2 corresponds to
    /// N = 10, 40, 160 at m = 4, 5, 6.
    std::vector<std::pair<int, int>> rows;
    MaterialParams params = manufactured_params();
    ViscousForm viscous_form = ViscousForm::grad_grad;
    double final_time = 1.0;
    /// rows run concurrently up to this many workers; each run stays
    /// sequential, so results do not depend on the schedule
    int jobs = 1;
};

/// Step count of the coupled rule dt = c h^2 at refinement level m
/// (h = sqrt(2) 2^-m on the unit square), c = 12.8.
int coupled_step_count(int level, double final_time = 1.0, double c = 12.8);

struct ConvergenceRow {
    int m = 0;
    int n_steps = 0;
    bool ok = false;
    std::string message; // failure description when !ok
    RunErrors errors;
};

/// Rates between two rows whose mesh size halves; absent entry = undefined
/// (non-positive error).
struct RateRow {
    int m_coarse = 0;
    int m_fine = 0;
    std::optional<double> u_h01;
    std::optional<double> v_h01;
    std::optional<double> p_l2;
};

struct ErrorReport {
    ThetaKind theta_kind = ThetaKind::exp_decay;
    std::vector<ConvergenceRow> rows;
    std::vector<RateRow> rates;
};

/// Runs all rows of the study; solver failures mark the row failed instead
/// of aborting the report. Rates are attached for successive successful rows
/// with m_fine = m_coarse + 1.
ErrorReport convergence_study(const ConvergenceConfig& config);

/// log2(err_coarse / err_fine) per error column, for consecutive rows under
/// h-halving.
std::vector<RateRow> compute_rates(const std::vector<ConvergenceRow>& rows);

/// The bone-compression benchmark on (0,2)x(0,1): gravity-type body forces,
/// a prescribed sinusoidal settlement on the bottom edge, no-slip top and
/// bottom, traction-free lateral fluid boundaries.
struct PracticalConfig {
    Rect domain{0.0, 2.0, 0.0, 1.0};
    int nx = 128;
    int ny = 64;
    double dt = 0.1;
    double final_time = 1.0;
    double lambda = 0.0; // lambda1 = lambda2
    ViscousForm viscous_form = ViscousForm::sym_grad;
};

/// Parameters of the practical problem for a given nonlinearity strength
/// (E1 = 1/8, E2 = -3/64, i.e. mu = 4, lambda = 12 in the linear limit;
/// the truncation threshold is large enough to stay inactive).
MaterialParams practical_params(double lambda);

struct PracticalResult {
    PracticalConfig config;
    MaterialParams params;
    /// max Frobenius norm of the discrete strain after each step
    std::vector<double> strain_linf;
    std::vector<double> times;
    TimeLoopResult loop;
};

PracticalResult practical_problem(const PracticalConfig& config);

/// Setup of the practical problem (exposed for tests and the CLI).
ProblemSetup make_practical_setup(const PracticalConfig& config,
                                  const MaterialParams& params);

/// Deterministic approximation of ||eps(u_h)||_Linf: the strain Frobenius
/// norm sampled at the 3x3 Gauss points and the 9 element nodes of every
/// cell.
double strain_linf(const Vector& u_coeffs, const DofMap& dofmap);

} // namespace porofem
