#include "porofem/constitutive.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace porofem {

double truncate(double f, double r) {
    if (!(r > 0.0))
        throw std::invalid_argument("truncate: threshold must be positive");
    if (f > r)
        return r;
    if (f < -r)
        return -r;
    return f;
}

double trace_factor(double s, const MaterialParams& params) {
    return params.E1 * (1.0 + params.lambda1 * s) -
           params.dim * std::abs(params.E2) * (1.0 + params.lambda2 * s);
}

StepCoefficients step_coefficients(double s, const MaterialParams& params) {
    const double t = truncate(s, params.delta);
    const double denom1 = 1.0 + params.lambda1 * t;
    const double f = trace_factor(t, params);
    if (denom1 <= 0.0)
        throw PositivityError("step_coefficients: 1 + lambda1*T_delta(div u) = " +
                              std::to_string(denom1) + " <= 0");
    if (f <= 0.0)
        throw PositivityError("step_coefficients: F(T_delta(div u)) = " + std::to_string(f) +
                              " <= 0");
    return {1.0 / denom1, (1.0 + params.lambda2 * t) / (denom1 * f)};
}

GammaConstants gamma_constants(const MaterialParams& params) {
    GammaConstants g;
    const double l1 = std::abs(params.lambda1);
    const double l2 = std::abs(params.lambda2);
    const double d = params.delta;

    g.gamma3 = params.E1 + params.dim * params.E2;
    g.gamma4 = params.E1 * params.lambda1 + params.dim * params.E2 * params.lambda2;

    const double denom_1 = 1.0 - l1 * d;
    const double denom_f = g.gamma3 - std::abs(g.gamma4) * d;
    const double denom_2 = 1.0 - l2 * d;
    g.admissible = denom_1 > 0.0 && denom_f > 0.0 && denom_2 > 0.0;

    g.gamma1 = 1.0 / (1.0 + l1 * d);
    g.gamma2 = denom_1 > 0.0 ? 1.0 / denom_1 : std::numeric_limits<double>::infinity();
    g.gamma5 = 1.0 / (g.gamma3 + std::abs(g.gamma4) * d);
    g.gamma6 = denom_f > 0.0 ? 1.0 / denom_f : std::numeric_limits<double>::infinity();
    g.gamma7 = denom_2;
    g.gamma8 = 1.0 + l2 * d;
    return g;
}

std::pair<double, double> lame_to_compliance(double mu, double lambda, int dim) {
    if (!(mu > 0.0))
        throw std::invalid_argument("lame_to_compliance: mu must be positive");
    if (lambda < 0.0)
        throw std::invalid_argument("lame_to_compliance: lambda must be nonnegative");
    const double e1 = 1.0 / (2.0 * mu);
    const double e2 = -lambda / (2.0 * mu * (dim * lambda + 2.0 * mu));
    return {e1, e2};
}

Eigen::Matrix2d stress_tensor(const Eigen::Matrix2d& strain, const MaterialParams& params) {
    const double s = strain.trace();
    const StepCoefficients c = step_coefficients(s, params);
    return (c.b1 / params.E1) * strain +
           (std::abs(params.E2) / params.E1) * c.b2 * s * Eigen::Matrix2d::Identity();
}

} // namespace porofem
