#pragma once

#include <functional>

#include <Eigen/Core>

#include "porofem/dofmap.hpp"
#include "porofem/quadrature.hpp"

namespace porofem {

/// Exact scalar field together with its gradient, for error measurement.
struct ExactScalar {
    std::function<double(const Eigen::Vector2d&)> value;
    std::function<Eigen::Vector2d(const Eigen::Vector2d&)> grad;
};

/// Exact 2-vector field together with its Jacobian (row i = grad of
/// component i).
struct ExactVector {
    std::function<Eigen::Vector2d(const Eigen::Vector2d&)> value;
    std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> grad;
};

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
};

/// L2 and H1-seminorm distance between an FE function and a closed-form
/// field, integrated cell-wise with the given rule. Use a rule at least one
/// order above the assembly rule so the comparison is not flattered by
/// shared quadrature points.
ErrorNorms error_norms(const Vector& coeffs, const DofMap& dofmap, const ExactScalar& exact,
                       const QuadratureRule& rule);
ErrorNorms error_norms(const Vector& coeffs, const DofMap& dofmap, const ExactVector& exact,
                       const QuadratureRule& rule);

/// Squared field norms of an FE function used by the per-step diagnostics.
struct FieldNormsSq {
    double l2 = 0.0;        // ||f||^2
    double grad = 0.0;      // ||grad f||^2 (Frobenius)
    double strain = 0.0;    // ||sym grad f||^2, vector fields only
    double div = 0.0;       // ||div f||^2, vector fields only
    double max_abs_div = 0.0; // max |div f| over quadrature points
};

FieldNormsSq field_norms_sq(const Vector& coeffs, const DofMap& dofmap,
                            const QuadratureRule& rule);

} // namespace porofem
