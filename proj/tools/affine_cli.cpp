// affine_cli: energy, eigen, verify, cheeger and report subcommands over one JSON config.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "affine/config.hpp"
#include "affine/report_io.hpp"
#include "affine/suite.hpp"

namespace fs = std::filesystem;
using namespace affine;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitOptimization = 4;
constexpr int kExitCheckFailed = 5;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::numeric_failure:
    case ErrorKind::degenerate_input: return kExitNumeric;
    case ErrorKind::optimization_failure: return kExitOptimization;
    default: return kExitUsage;
  }
}

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<long long> seed;
  std::optional<int> threads;
  bool print_defaults = false;

  // energy / eigen
  std::optional<std::string> domain;
  std::optional<double> h;
  std::optional<double> p;
  std::optional<std::string> function;
  std::optional<std::string> function_file;
  bool affine = false;
  bool euclidean = false;

  // verify / report
  std::optional<std::string> suite;
  std::vector<std::string> checks;

  // cheeger
  std::optional<std::string> omega;
  std::optional<std::string> family;
  std::optional<int> samples;
};

json merged_config(const Flags& f) {
  json tree = default_config();
  if (!f.config.empty()) {
    const json user = load_config_file(f.config);
    if (!user.is_object()) fail(ErrorKind::usage, "config /: expected an object");
    merge_into(tree, user);
  }
  if (f.out) tree["out"] = *f.out;
  if (f.seed) tree["seed"] = *f.seed;
  if (f.threads) tree["threads"] = *f.threads;
  if (f.domain) {
    const double h = tree["domain"].value("h", 1.0 / 64);
    tree["domain"] = domain_preset(*f.domain, h);
    if (*f.domain == "ball3") {
      tree["context"]["n"] = 3;
      tree["function"]["center"] = {0.0, 0.0, 0.0};
    }
  }
  if (f.h) tree["domain"]["h"] = *f.h;
  if (f.p) tree["context"]["p"] = *f.p;
  if (f.function) {
    const json keep = tree["function"];
    tree["function"] = {{"type", *f.function}};
    for (const char* k : {"center", "radius", "width", "transform"})
      if (keep.contains(k)) tree["function"][k] = keep[k];
  }
  if (f.function_file) tree["function"] = {{"type", "file"}, {"path", *f.function_file}};
  if (f.affine) tree["affine"] = true;
  if (f.euclidean) tree["affine"] = false;
  if (f.suite) tree["verify"]["suite"] = *f.suite;
  if (!f.checks.empty()) tree["verify"]["checks"] = f.checks;
  if (f.omega) tree["cheeger"]["omega"] = {{"type", "file"}, {"path", *f.omega}};
  if (f.family) tree["cheeger"]["family"] = *f.family;
  if (f.samples) tree["cheeger"]["samples"] = *f.samples;
  if (f.euclidean) tree["cheeger"]["euclidean"] = true;
  return tree;
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

json envelope(const RunConfig& rc, const std::string& command) {
  return {{"command", command}, {"config_digest", rc.digest()}, {"seed", rc.seed}};
}

void print_defaults() {
  std::cout << default_config().dump(2) << "\n\n";
  const Tolerances t;
  std::cout << "tolerances\n"
            << std::left << std::setw(24) << "  discrete" << t.discrete << "  relative, lambda comparisons\n"
            << std::setw(24) << "  equality" << t.equality << "  relative, ellipsoid equality cases\n"
            << std::setw(24) << "  talenti_factor" << t.talenti_factor << "  multiplicative slack on each level\n"
            << std::setw(24) << "  polya_szego" << t.polya_szego << "  relative, E(f) >= |grad f*|_p\n"
            << std::setw(24) << "  polya_szego_equality" << t.polya_szego_equality << "  relative, pullback class\n"
            << std::setw(24) << "  sobolev" << t.sobolev << "  relative, Sobolev inequality\n"
            << std::setw(24) << "  sobolev_equality" << t.sobolev_equality << "  relative, p = 1 disk\n"
            << std::setw(24) << "  relations" << t.relations << "  relative, lambda >= lambda^A\n"
            << std::setw(24) << "  kernel_slack" << t.kernel_slack << "  absolute per unit, kernel bounds\n";
}

// Subcommands ------------------------------------------------------------------

int cmd_energy(const RunConfig& rc) {
  const auto ctx = rc.context.build();
  const auto mask = rc.domain.build();
  const auto f = rc.function.build(mask);
  const auto routes = energy_routes(ctx, f);
  const double grad = gradient_norm(f, ctx.p());
  const double ratio = routes.integral_route / grad;
  const bool pass = ratio <= 1 + 1e-3;
  json j = envelope(rc, "energy");
  j["context"] = ctx.describe();
  j["domain"] = mask->describe();
  j["h"] = mask->h();
  j["function"] = rc.function.type;
  j["function_digest"] = digest_of(f);
  j["energy_integral_route"] = routes.integral_route;
  j["energy_volume_route"] = routes.volume_route;
  j["polar_projection_volume"] = routes.volume;
  j["gradient_norm"] = grad;
  j["ratio"] = ratio;
  j["ratio_le_one"] = pass;
  j["ratio_tolerance"] = 1e-3;
  write_json(fs::path(rc.out) / "energy.json", j);
  std::cout << std::setprecision(12) << "energy " << routes.integral_route << " (volume route " << routes.volume_route
            << ")\n|grad f|_p " << grad << "\nratio " << ratio << (pass ? "  <= 1 ok" : "  > 1 FAIL") << "\n";
  return pass ? 0 : kExitCheckFailed;
}

EigenResult solve(const RunConfig& rc, const MaskPtr& mask) {
  if (rc.affine) {
    const auto ctx = rc.context.build();
    return minimize_affine(ctx, mask, rc.context.q.value_or(ctx.p()), rc.solver);
  }
  const double p = rc.context.p;
  return minimize_euclidean(mask, p, rc.context.q.value_or(p), rc.solver);
}

int cmd_eigen(const RunConfig& rc) {
  const auto mask = rc.domain.build();
  const auto r = solve(rc, mask);
  json j = envelope(rc, "eigen");
  j["result"] = to_json(r);
  j["minimizer_digest"] = digest_of(r.minimizer);
  const fs::path out(rc.out);
  write_json(out / "eigen.json", j);
  {
    auto os = open_output(out / "history.csv");
    write_history_csv(os, r);
  }
  {
    auto os = open_output(out / "minimizer.csv");
    write_grid_csv(os, r.minimizer);
  }
  std::cout << std::setprecision(12) << (r.affine ? "lambda^A " : "lambda ") << r.lambda << "  (" << r.method << ", "
            << r.stop_reason << ", " << r.iterations << " iterations, h=" << r.h << ")\n";
  return 0;
}

SuiteParams suite_params(const RunConfig& rc) {
  SuiteParams P = rc.suite == "full" ? full_params() : core_params();
  P.seed = rc.seed;
  P.solver = rc.solver;
  P.tol = rc.tolerances;
  P.talenti = rc.talenti;
  return P;
}

int cmd_verify(const RunConfig& rc) {
  const auto P = suite_params(rc);
  std::vector<const NamedCheck*> selected;
  if (rc.checks.empty()) {
    for (const auto& c : check_registry()) selected.push_back(&c);
  } else {
    for (const auto& n : rc.checks) selected.push_back(&find_check(n));
  }
  std::vector<CheckOutcome> outs;
  json timing = json::object();
  const fs::path out(rc.out);
  for (const auto* c : selected) {
    auto o = run_check(*c, P);
    std::cout << "[" << std::setw(2) << o.criterion << "] " << std::left << std::setw(20) << o.name << std::right
              << (o.pass ? " PASS" : " FAIL") << "  digest " << o.digest() << "\n"
              << std::flush;
    timing[o.name] = o.seconds;
    outs.push_back(std::move(o));
  }
  bool pass = true;
  json j = envelope(rc, "verify");
  j["suite"] = P.name;
  j["checks"] = json::array();
  for (const auto& o : outs) {
    pass = pass && o.pass;
    json c{{"name", o.name}, {"criterion", o.criterion}, {"pass", o.pass}, {"digest", o.digest()}};
    c["reports"] = json::array();
    for (const auto& r : o.reports) c["reports"].push_back(to_json(r));
    j["checks"].push_back(std::move(c));
  }
  const auto hash = suite_hash(outs);
  j["determinism_hash"] = hash;
  j["pass"] = pass;
  write_json(out / "verify.json", j);
  write_json(out / "timing.json", timing);
  std::cout << "determinism hash " << hash << "\n" << (pass ? "all checks passed" : "some checks FAILED") << "\n";
  return pass ? 0 : kExitCheckFailed;
}

int cmd_cheeger(const RunConfig& rc) {
  const auto& cs = rc.cheeger;
  std::optional<EnergyContext> ctx;
  if (!cs.euclidean) {
    ctx.emplace(rc.context.build(1.0));
    if (ctx->n() != 2) fail(ErrorKind::usage, "config /context/n: Cheeger search is planar (n = 2)");
  }
  const auto res = search_cheeger(ctx ? &*ctx : nullptr, cs.omega, cs.family);
  const auto rep = cheeger_report(res, cs.family);
  json j = envelope(rc, "cheeger");
  j["omega_digest"] = digest_of(cs.omega);
  j["omega_area"] = cs.omega.area();
  j["report"] = to_json(rep);
  j["best_ratio_upper_bound"] = res.best.ratio;
  j["best_parameters"] = res.best.parameters;
  j["note"] = "family-restricted search: the ratio is an upper bound for the Cheeger constant";
  const fs::path out(rc.out);
  write_json(out / "cheeger.json", j);
  {
    auto os = open_output(out / "cheeger_best.csv");
    write_polygon_csv(os, res.best.polygon);
  }
  std::cout << std::setprecision(12) << (cs.euclidean ? "euclidean" : "affine") << " Cheeger upper bound "
            << res.best.ratio << " over " << res.candidates.size() << " " << to_string(cs.family.family)
            << " candidates\n";
  return rep.pass ? 0 : kExitCheckFailed;
}

std::string summarize(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error&) {
    return "  " + path.filename().string() + ": unreadable\n";
  }
  std::ostringstream os;
  os.precision(10);
  const auto cmd = j.value("command", std::string("?"));
  os << "  " << path.filename().string() << " (" << cmd << ", config " << j.value("config_digest", std::string("?"))
     << ")\n";
  if (cmd == "verify") {
    for (const auto& c : j["checks"])
      os << "    [" << c["criterion"].get<int>() << "] " << c["name"].get<std::string>() << " "
         << (c["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
    os << "    determinism hash " << j["determinism_hash"].get<std::string>() << "\n";
  } else if (cmd == "eigen") {
    os << "    lambda " << j["result"]["lambda"].get<double>() << " (" << j["result"]["method"].get<std::string>()
       << ")\n";
  } else if (cmd == "energy") {
    os << "    energy " << j["energy_integral_route"].get<double>() << ", ratio " << j["ratio"].get<double>() << "\n";
  } else if (cmd == "cheeger") {
    os << "    best ratio (upper bound) " << j["best_ratio_upper_bound"].get<double>() << "\n";
  }
  return os.str();
}

int cmd_report(const RunConfig& rc) {
  const fs::path out(rc.out);
  const auto mask = rc.domain.build();
  const auto eig = solve(rc, mask);
  {
    auto os = open_output(out / "descent.csv");
    write_history_csv(os, eig);
  }
  const auto P = suite_params(rc);
  const auto tal = run_talenti(P);
  {
    auto os = open_output(out / "talenti.csv");
    write_talenti_csv(os, tal.report);
  }
  json j = envelope(rc, "report");
  j["eigen"] = to_json(eig);
  j["talenti"] = to_json(tal.report);
  write_json(out / "report.json", j);

  std::ostringstream s;
  s.precision(10);
  s << "config digest " << rc.digest() << "\n\n";
  s << "eigen solve on " << mask->describe() << " (h=" << mask->h() << ")\n";
  s << "  " << (eig.affine ? "lambda^A " : "lambda ") << eig.lambda << ", " << eig.method << ", " << eig.stop_reason
    << " after " << eig.iterations << " iterations\n";
  s << "  descent curve: descent.csv\n\n";
  s << "Talenti comparison, n=3 ball, h=" << P.h_talenti << ": " << (tal.report.pass ? "pass" : "FAIL")
    << (tal.report.inconclusive ? " (inconclusive)" : "") << ", " << tal.report.samples.size()
    << " resolved levels, worst margin " << tal.report.worst_margin() << "\n";
  s << "  margin curve: talenti.csv\n\n";
  std::string existing;
  for (const char* name : {"verify.json", "eigen.json", "energy.json", "cheeger.json"})
    existing += summarize(out / name);
  if (!existing.empty()) s << "earlier reports in " << out.string() << "\n" << existing;
  {
    auto os = open_output(out / "summary.txt");
    os << s.str();
  }
  std::cout << s.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine Sobolev energies, eigenvalues and inequality checks"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON config file (merged over defaults)")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "output directory");
  app.add_option("--seed", f.seed, "base seed for every random process");
  app.add_option("--threads", f.threads, "worker cap (needs an OpenMP build)")->check(CLI::NonNegativeNumber);
  app.add_flag("--print-defaults", f.print_defaults, "print the default config and tolerance table");

  auto* energy = app.add_subcommand("energy", "both energy routes, |grad f|_p and their ratio");
  auto* eigen = app.add_subcommand("eigen", "first eigenvalue and minimizer");
  auto* verify = app.add_subcommand("verify", "run verification checks");
  auto* cheeger = app.add_subcommand("cheeger", "family-restricted Cheeger search");
  auto* report = app.add_subcommand("report", "summary and plot-data CSVs");

  for (auto* sc : {energy, eigen, report}) {
    sc->add_option("--domain", f.domain, "domain preset: disk, square, unit_square, lshape, ellipse, ball3");
    sc->add_option("--grid-h", f.h, "grid spacing h")->check(CLI::PositiveNumber);
    sc->add_option("--p", f.p, "exponent p >= 1");
  }
  energy->add_option("--function", f.function, "cone, bump, characteristic_mollified");
  energy->add_option("--function-file", f.function_file, "grid CSV with the function values")->check(CLI::ExistingFile);
  for (auto* sc : {eigen, report}) {
    auto* a = sc->add_flag("--affine", f.affine, "affine quotient (default)");
    auto* e = sc->add_flag("--euclidean", f.euclidean, "Euclidean p-Laplacian quotient");
    a->excludes(e);
  }
  for (auto* sc : {verify, report}) sc->add_option("--suite", f.suite, "core or full");
  verify->add_option("--check", f.checks, "run only the named checks (repeatable)");
  cheeger->add_option("--omega", f.omega, "polygon CSV (x,y per vertex)")->check(CLI::ExistingFile);
  cheeger->add_option("--family", f.family, "rounded_insets, inscribed_disks, inscribed_ellipses");
  cheeger->add_option("--samples", f.samples, "candidate count")->check(CLI::PositiveNumber);
  cheeger->add_flag("--euclidean", f.euclidean, "perimeter/area instead of the affine ratio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (f.print_defaults) {
      print_defaults();
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    }
    const RunConfig rc = parse_config(merged_config(f));
    apply_threads(rc.threads);
    if (energy->parsed()) return cmd_energy(rc);
    if (eigen->parsed()) return cmd_eigen(rc);
    if (verify->parsed()) return cmd_verify(rc);
    if (cheeger->parsed()) return cmd_cheeger(rc);
    return cmd_report(rc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
