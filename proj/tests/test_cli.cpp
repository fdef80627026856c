#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(AFFINE_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  EXPECT_NE(p, nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("affine_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(Cli, PrintDefaults) {
  const auto r = run("--print-defaults");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"context\""), std::string::npos);
  EXPECT_NE(r.out.find("talenti_factor"), std::string::npos);
}

TEST(Cli, BadConfigExitsTwoWithSchemaPath) {
  const auto d = scratch("badcfg");
  std::ofstream(d / "c.json") << R"({"context": {"p": "two"}})";
  const auto r = run("energy --config " + (d / "c.json").string() + " --out " + d.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/context/p"), std::string::npos) << r.out;
  EXPECT_EQ(run("verify --check nonexistent --out " + d.string()).code, 2);
  EXPECT_EQ(run("eigen --affine --euclidean").code, 2);
  std::ofstream(d / "broken.json") << "{";
  EXPECT_EQ(run("energy --config " + (d / "broken.json").string()).code, 2);
}

TEST(Cli, EnergyRadialConeRatioNearOne) {
  const auto d = scratch("cone");
  const auto r = run("energy --domain disk --grid-h 0.015625 --p 2 --function cone --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = read_json(d / "energy.json");
  EXPECT_NEAR(j["ratio"].get<double>(), 1.0, 1e-2);
  EXPECT_NEAR(j["energy_integral_route"].get<double>(), j["energy_volume_route"].get<double>(),
              1e-12 * j["energy_volume_route"].get<double>());
  EXPECT_FALSE(j["config_digest"].get<std::string>().empty());
}

TEST(Cli, EnergyShearedConeRatioBelowOne) {
  const auto d = scratch("shear");
  std::ofstream(d / "c.json") << R"({"domain": {"type": "box", "lo": [-2, -2], "hi": [2, 2], "h": 0.03125},
    "function": {"type": "cone", "transform": [[1, 1.5], [0, 1]]}})";
  const auto r = run("energy --config " + (d / "c.json").string() + " --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_LT(read_json(d / "energy.json")["ratio"].get<double>(), 0.95);
}

TEST(Cli, EigenAffineMatchesEuclideanOnDisk) {
  const auto a = scratch("eig_a"), e = scratch("eig_e");
  ASSERT_EQ(run("eigen --domain disk --grid-h 0.03125 --p 2 --affine --out " + a.string()).code, 0);
  ASSERT_EQ(run("eigen --domain disk --grid-h 0.03125 --p 2 --euclidean --out " + e.string()).code, 0);
  const double la = read_json(a / "eigen.json")["result"]["lambda"].get<double>();
  const double le = read_json(e / "eigen.json")["result"]["lambda"].get<double>();
  EXPECT_NEAR(la, le, 1e-2 * le);
  EXPECT_EQ(slurp(a / "history.csv").substr(0, 19), "iter,quotient,step\n");
  EXPECT_EQ(slurp(a / "minimizer.csv").substr(0, 22), "ix,iy,x,y,inside,value");
}

TEST(Cli, VerifyIsByteIdentical) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(run("verify --check kernel_bounds --seed 7 --out " + a.string()).code, 0);
  ASSERT_EQ(run("verify --check kernel_bounds --seed 7 --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "verify.json"), slurp(b / "verify.json"));
  const auto c = scratch("det_c");
  ASSERT_EQ(run("verify --check kernel_bounds --seed 8 --out " + c.string()).code, 0);
  EXPECT_NE(read_json(a / "verify.json")["determinism_hash"], read_json(c / "verify.json")["determinism_hash"]);
}

TEST(Cli, CheegerWritesCandidate) {
  const auto d = scratch("cheeger");
  std::ofstream(d / "omega.csv") << "x,y\n0,0\n1,0\n1,1\n0,1\n";
  const auto r = run("cheeger --omega " + (d / "omega.csv").string() +
                     " --family rounded_insets --samples 40 --euclidean --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const double best = read_json(d / "cheeger.json")["best_ratio_upper_bound"].get<double>();
  // Euclidean Cheeger constant of the unit square, attained by a rounded inset.
  EXPECT_NEAR(best, (4 - M_PI) / (2 - std::sqrt(M_PI)), 2e-2 * best);
  EXPECT_EQ(slurp(d / "cheeger_best.csv").substr(0, 4), "x,y\n");
}

TEST(Cli, ReportWritesPlotData) {
  const auto d = scratch("report");
  ASSERT_EQ(run("verify --check cheeger_scaling --out " + d.string()).code, 0);
  const auto r = run("report --domain disk --grid-h 0.0625 --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto tal = slurp(d / "talenti.csv");
  EXPECT_EQ(tal.substr(0, 20), "t,mu,lhs,rhs,margin\n");
  EXPECT_GT(std::count(tal.begin(), tal.end(), '\n'), 30);
  EXPECT_EQ(slurp(d / "descent.csv").substr(0, 19), "iter,quotient,step\n");
  EXPECT_NE(slurp(d / "summary.txt").find("cheeger_scaling pass"), std::string::npos);
}
