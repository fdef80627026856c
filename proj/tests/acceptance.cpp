// Acceptance runner: one pass/fail line per criterion at the acceptance parameters.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include "affine/suite.hpp"

using namespace affine;

namespace {

const char* kTitles[] = {
    "",
    "energy routes agree to 1e-12 on 20 random functions",
    "E <= |grad f|_p (1+1e-3) on 50 functions per Q",
    "radial profiles: E = |grad f|_p within 1e-2 at h=1/64",
    "SL(2) drift <= 2e-2 at h=1/64, decreasing at 1/128",
    "centroid of the ball projection body is a ball of the closed-form radius",
    "Euclidean eigenvalues: disk vs j01^2 (2%), pi-square vs 2 (1%)",
    "finite-difference gradient agreement 1e-5 at 3 iterates",
    "rigidity on the disk: lambda vs lambda^A within 1e-2",
    "lambda >= lambda^A on square, L-shape, ellipse",
    "Faber-Krahn: square >= 1.03 disk, det-1 ellipse within 3%",
    "Talenti comparison on the 48^3 ball, factor 1.05",
    "Polya-Szego on 20 sheared bumps and SL(2) pullbacks",
    "p = 1 Sobolev equality on the 64-gon, strict on the square",
    "Cheeger ratio scaling law over 100 (A, C) at 1e-9",
    "kernel bounds (a), (b), (d) with 1e4 samples each",
    "repeated verify --suite core runs give identical hashes",
};

void line(int k, bool pass, const std::string& detail) {
  std::cout << "criterion " << std::setw(2) << k << ": " << (pass ? "PASS" : "FAIL") << "  " << kTitles[k] << "  ["
            << detail << "]" << std::endl;
}

std::string hash_of_core_run(const std::filesystem::path& out) {
  const std::string cmd = std::string(AFFINE_CLI_PATH) + " verify --suite core --out " + out.string() + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {};
  std::string text;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) text += buf.data();
  const int status = pclose(p);
  const auto at = text.find("determinism hash ");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0 || at == std::string::npos) return {};
  return text.substr(at + 17, 16);
}

}  // namespace

int main() {
  const auto P = full_params();
  bool all = true;
  for (const auto& c : check_registry()) {
    CheckOutcome o;
    std::string detail;
    try {
      o = run_check(c, P);
      double worst = INFINITY;
      std::size_t records = 0;
      for (const auto& r : o.reports) {
        worst = std::min(worst, r.worst_margin());
        records += r.samples.size();
      }
      std::ostringstream os;
      os.precision(3);
      os << records << " records, worst margin " << worst << ", " << std::fixed << o.seconds << " s";
      detail = os.str();
    } catch (const std::exception& e) {
      o.pass = false;
      detail = e.what();
    }
    all = all && o.pass;
    line(c.criterion, o.pass, detail);
  }

  const auto base = std::filesystem::temp_directory_path() / "affine_acceptance";
  const auto a = hash_of_core_run(base / "a");
  const auto b = hash_of_core_run(base / "b");
  const bool det = !a.empty() && a == b;
  all = all && det;
  line(16, det, a + " / " + b);
  return all ? 0 : 1;
}
