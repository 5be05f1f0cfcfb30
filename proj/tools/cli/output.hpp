#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include <bilevel/types.hpp>
#include <bilevel/verify.hpp>

namespace bilevel::cli {

/// Shortest text that round-trips: 17 significant digits.
std::string format_double(double v);

/// RFC-4180 field quoting: quoted only when the field holds a comma,
/// quote, CR or LF; embedded quotes are doubled.
std::string csv_field(const std::string& field);

std::string csv_row(const std::vector<std::string>& fields);

inline constexpr const char* kTraceHeader =
    "k,f_value,penalty_value,F_gamma,proj_grad_norm_sq,inner_iters,elapsed_ns";

std::string trace_csv(const std::vector<IterateRecord>& trace);

/// Writes through a temporary file and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

nlohmann::json vector_json(const Vector& v);
nlohmann::json config_json(const SolverConfig& c);
nlohmann::json report_json(const CheckReport& r);

/// JSON number, or null for non-finite values.
nlohmann::json number_or_null(double v);

}  // namespace bilevel::cli
