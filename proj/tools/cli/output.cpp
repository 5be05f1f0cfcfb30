#include "output.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include <bilevel/errors.hpp>

namespace bilevel::cli {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

std::string trace_csv(const std::vector<IterateRecord>& trace) {
  std::string out = std::string(kTraceHeader) + "\r\n";
  for (const IterateRecord& r : trace) {
    out += csv_row({std::to_string(r.k), format_double(r.f_value), format_double(r.penalty_value),
                    format_double(r.F_gamma), format_double(r.proj_grad_norm_sq),
                    std::to_string(r.inner_iters), std::to_string(r.elapsed_ns)});
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number_or_null(v[i]));
  return arr;
}

nlohmann::json config_json(const SolverConfig& c) {
  nlohmann::json j;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json(nullptr);
  j["beta"] = c.beta ? nlohmann::json(*c.beta) : nlohmann::json(nullptr);
  j["t"] = c.t ? nlohmann::json(*c.t) : nlohmann::json(nullptr);
  j["K"] = c.K;
  j["inner_schedule"] = c.inner.mode == InnerSchedule::Mode::Fixed ? "fixed" : "log";
  j["inner_T"] = c.inner.T;
  j["warm_start"] = c.warm_start;
  j["tol_proj_grad"] = c.tol_proj_grad;
  j["penalty"] = std::string(to_string(c.penalty));
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["delta0"] = c.delta0;
  j["q"] = c.q;
  j["step_rule"] = std::string(to_string(c.step_rule));
  j["x0"] = vector_json(c.x0);
  j["y0"] = vector_json(c.y0);
  j["record_timing"] = c.record_timing;
  return j;
}

nlohmann::json report_json(const CheckReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["status"] = std::string(to_string(r.status));
  j["worst_residual"] = number_or_null(r.worst_residual);
  j["tolerance"] = r.tolerance;
  j["samples"] = r.samples;
  j["estimated"] = r.estimated;
  j["details"] = r.details;
  return j;
}

}  // namespace bilevel::cli
