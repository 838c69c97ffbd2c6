#pragma once

#include <stdexcept>
#include <utility>

#include <Eigen/Core>

namespace porofem {

/// Raised when the strain-stress coefficients lose positivity at some point,
/// i.e. the deformation left the regime where the semi-implicit step is
/// well posed.
class PositivityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Material and model parameters of the coupled fluid / porous-solid system.
///
/// E1, E2 are the compliance moduli of the strain-stress law (E1 > 0,
/// E2 < 0, E1 - d|E2| > 0); lambda1, lambda2 scale its nonlinear
/// perturbation; delta is the truncation threshold applied to the
/// displacement divergence inside the constitutive coefficients.
struct MaterialParams {
    double alpha = 1.0;   // drag coefficient
    double nu = 1.0;      // dynamic viscosity
    double rho = 1.0;     // fluid density
    double rho_s = 0.0;   // solid body-force density (practical problem only)
    double E1 = 1.0;
    double E2 = -0.2;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double delta = 0.4;
    int dim = 2;

    bool sign_conditions_hold() const {
        return E1 > 0.0 && E2 < 0.0 && E1 - dim * std::abs(E2) > 0.0;
    }
};

/// Uniform bounds on the truncated constitutive coefficients, valid whenever
/// `admissible` is set:
///   gamma1 <= 1/(1 + lambda1 T_delta s) <= gamma2
///   gamma5 <= 1/F(T_delta s)            <= gamma6
///   gamma7 <= 1 + lambda2 T_delta s     <= gamma8
/// with gamma3, gamma4 the affine coefficients of F. Inadmissibility is a
/// reported state, not an error: the practical-problem runs use parameter
/// choices outside these bounds and rely on the pointwise positivity check
/// during assembly instead.
struct GammaConstants {
    double gamma1 = 0.0, gamma2 = 0.0;
    double gamma3 = 0.0, gamma4 = 0.0;
    double gamma5 = 0.0, gamma6 = 0.0;
    double gamma7 = 0.0, gamma8 = 0.0;
    bool admissible = false;
};

/// Clamp of f to [-r, r]. Throws std::invalid_argument for r <= 0.
double truncate(double f, double r);

/// F(s) = E1 (1 + lambda1 s) - d |E2| (1 + lambda2 s), the denominator factor
/// of the inverted strain-stress law.
double trace_factor(double s, const MaterialParams& params);

/// The two coefficients of the frozen (semi-implicit) solid operator,
/// evaluated from a previous-step divergence value s:
///   b1 = 1/(1 + lambda1 t),  b2 = (1 + lambda2 t) / ((1 + lambda1 t) F(t)),
/// with t = truncate(s, delta). Both are strictly positive in the admissible
/// regime; positivity is checked here and violations throw PositivityError.
struct StepCoefficients {
    double b1 = 0.0;
    double b2 = 0.0;
};
StepCoefficients step_coefficients(double s, const MaterialParams& params);

/// Computes the gamma bounds and the admissibility flag.
GammaConstants gamma_constants(const MaterialParams& params);

/// Compliance moduli (E1, E2) equivalent to Lame parameters (mu, lambda) in
/// the linear limit lambda1 = lambda2 = 0. lambda = 0 yields E2 = 0, which
/// sits on the boundary of the sign conditions (E2 < 0 is required).
std::pair<double, double> lame_to_compliance(double mu, double lambda, int dim);

/// Stress from strain via the truncated inverted law
///   T = 1/(E1 (1+lambda1 t)) ( eps + |E2| (1+lambda2 t) s / F(t) I ),
/// s = tr(eps), t = truncate(s, delta). Used by the manufactured-forcing
/// oracle and the linear-limit checks.
Eigen::Matrix2d stress_tensor(const Eigen::Matrix2d& strain, const MaterialParams& params);

} // namespace porofem
