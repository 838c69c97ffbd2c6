#pragma once

#include <string>
#include <vector>

#include "porofem/experiments.hpp"

namespace porofem {

/// Errors table: one row per (m, N) with the five error norms, scientific
/// notation, matching the convergence-study column order.
void write_error_report_csv(const ErrorReport& report, const std::string& path);

/// Rates table: error/rate column pairs for the three rate-tracked norms;
/// rate fields are empty on rows without a predecessor.
void write_rates_csv(const ErrorReport& report, const std::string& path);

/// Strain-history table of the practical problem: one row per time, one
/// column per lambda value.
void write_strain_csv(const std::vector<double>& times,
                      const std::vector<double>& lambdas,
                      const std::vector<std::vector<double>>& series_per_lambda,
                      const std::string& path);

/// Per-step diagnostics of a run.
void write_diagnostics_csv(const std::vector<StepDiagnostics>& diagnostics, double dt,
                           const std::string& path);

/// Minimal RFC-4180-style reader used to round-trip the writers' output:
/// returns all records as strings, header included.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

/// Canonical number format of every CSV writer (scientific, 10 significant
/// digits past the leading one).
std::string csv_number(double value);

} // namespace porofem
