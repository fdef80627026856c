#pragma once

// JSON and CSV emission for reports, eigen results and plot data.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "affine/eigensolver.hpp"
#include "affine/error.hpp"
#include "affine/inequalities.hpp"

namespace affine {

inline nlohmann::json to_json(const SampleRecord& s) {
  return {{"label", s.label},     {"inputs", s.inputs},       {"lhs", s.lhs},   {"rhs", s.rhs},
          {"relation", to_string(s.relation)}, {"margin", s.margin}, {"tolerance", s.tolerance},
          {"pass", s.pass},       {"count", s.count}};
}

inline nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["check"] = r.check;
  j["pass"] = r.pass;
  j["inconclusive"] = r.inconclusive;
  j["digest"] = r.digest();
  j["worst_margin"] = r.samples.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.worst_margin());
  j["metadata"] = nlohmann::json::array();
  for (const auto& [k, v] : r.metadata) j["metadata"].push_back({k, v});
  j["samples"] = nlohmann::json::array();
  for (const auto& s : r.samples) j["samples"].push_back(to_json(s));
  return j;
}

/// Summary of an eigen solve; the minimizer itself goes to a grid CSV.
inline nlohmann::json to_json(const EigenResult& r) {
  nlohmann::json j{{"lambda", r.lambda},   {"method", r.method},         {"stop_reason", r.stop_reason},
                   {"iterations", r.iterations}, {"h", r.h},          {"p", r.p},
                   {"q", r.q},             {"eps", r.eps},               {"affine", r.affine},
                   {"rules", r.rules},     {"body", r.body},             {"domain", r.domain}};
  j["gradient_checks"] = nlohmann::json::array();
  for (const auto& c : r.gradient_checks) j["gradient_checks"].push_back({{"iter", c.iter}, {"max_rel_error", c.max_rel_error}});
  return j;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path);
  if (!os) fail(ErrorKind::usage, "cannot write " + path.string());
  os.precision(17);
  return os;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = open_output(path);
  os << j.dump(2) << "\n";
}

/// Descent curve: iter,quotient,step.
inline void write_history_csv(std::ostream& os, const EigenResult& r) {
  os.precision(17);
  os << "iter,quotient,step\n";
  for (const auto& e : r.history) os << e.iter << "," << e.quotient << "," << e.step << "\n";
}

/// Talenti margin curve from the report records (label "t=<value>", lhs, rhs) plus mu(t) from metadata.
inline void write_talenti_csv(std::ostream& os, const InequalityReport& r) {
  os.precision(17);
  os << "t,mu,lhs,rhs,margin\n";
  for (const auto& s : r.samples) {
    double t = 0.0, mu = 0.0;
    if (std::sscanf(s.label.c_str(), "t=%lf mu=%lf", &t, &mu) < 1) continue;
    os << t << "," << mu << "," << s.lhs << "," << s.rhs << "," << s.margin << "\n";
  }
}

}  // namespace affine
