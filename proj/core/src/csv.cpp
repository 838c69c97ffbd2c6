#include "porofem/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace porofem {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: byte-stable line endings
    if (!out)
        throw std::runtime_error("csv: cannot open " + path + " for writing");
    return out;
}

} // namespace

std::string csv_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.10e", value);
    return buffer;
}

void write_error_report_csv(const ErrorReport& report, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "m,N,err_u_h01,err_u_l2,err_v_h01,err_v_l2,err_p_l2\n";
    for (const ConvergenceRow& row : report.rows) {
        if (!row.ok)
            continue;
        out << row.m << ',' << row.n_steps << ',' << csv_number(row.errors.u_h01) << ','
            << csv_number(row.errors.u_l2) << ',' << csv_number(row.errors.v_h01) << ','
            << csv_number(row.errors.v_l2) << ',' << csv_number(row.errors.p_l2) << '\n';
    }
}

void write_rates_csv(const ErrorReport& report, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "m,N,err_u_h01,rate_u,err_v_h01,rate_v,err_p_l2,rate_p\n";
    const auto rate_for = [&](int m_fine) -> const RateRow* {
        for (const RateRow& r : report.rates)
            if (r.m_fine == m_fine)
                return &r;
        return nullptr;
    };
    const auto field = [](const std::optional<double>& r) {
        return r ? csv_number(*r) : std::string();
    };
    for (const ConvergenceRow& row : report.rows) {
        if (!row.ok)
            continue;
        const RateRow* rates = rate_for(row.m);
        out << row.m << ',' << row.n_steps << ',' << csv_number(row.errors.u_h01) << ','
            << (rates ? field(rates->u_h01) : "") << ',' << csv_number(row.errors.v_h01)
            << ',' << (rates ? field(rates->v_h01) : "") << ','
            << csv_number(row.errors.p_l2) << ',' << (rates ? field(rates->p_l2) : "")
            << '\n';
    }
}

void write_strain_csv(const std::vector<double>& times, const std::vector<double>& lambdas,
                      const std::vector<std::vector<double>>& series_per_lambda,
                      const std::string& path) {
    if (lambdas.size() != series_per_lambda.size())
        throw std::invalid_argument("write_strain_csv: one series per lambda required");
    std::ofstream out = open_out(path);
    out << "t";
    for (double lambda : lambdas)
        out << ",lambda=" << lambda;
    out << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << csv_number(times[i]);
        for (const auto& series : series_per_lambda)
            out << ',' << csv_number(series.at(i));
        out << '\n';
    }
}

void write_diagnostics_csv(const std::vector<StepDiagnostics>& diagnostics, double dt,
                           const std::string& path) {
    std::ofstream out = open_out(path);
    out << "t,min_shear_coeff,min_trace_factor,max_abs_div_prev,solver_residual,"
           "u_l2_sq,v_l2_sq,strain_l2_sq,grad_v_l2_sq,div_u_l2_sq\n";
    for (std::size_t i = 0; i < diagnostics.size(); ++i) {
        const StepDiagnostics& d = diagnostics[i];
        out << csv_number((i + 1) * dt) << ',' << csv_number(d.min_shear_coeff) << ','
            << csv_number(d.min_trace_factor) << ',' << csv_number(d.max_abs_div_prev)
            << ',' << csv_number(d.solver_residual) << ',' << csv_number(d.u_l2_sq) << ','
            << csv_number(d.v_l2_sq) << ',' << csv_number(d.strain_l2_sq) << ','
            << csv_number(d.grad_v_l2_sq) << ',' << csv_number(d.div_u_l2_sq) << '\n';
    }
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("csv: cannot open " + path);
    std::vector<std::vector<std::string>> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ','))
            fields.push_back(field);
        if (!line.empty() && line.back() == ',')
            fields.emplace_back();
        records.push_back(std::move(fields));
    }
    return records;
}

} // namespace porofem
