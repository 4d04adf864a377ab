#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "polent/error.hpp"
#include "polent/io.hpp"
#include "polent/metrics.hpp"
#include "polent_cli/commands.hpp"
#include "polent_cli/config.hpp"

namespace fs = std::filesystem;

namespace polent::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("polent_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(POLENT_EXE) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

std::map<std::string, double> read_report(const fs::path& p) {
  std::map<std::string, double> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string key, value;
    if (!(fields >> key >> value) || key[0] == '#') continue;
    out[key] = io::parse_double(value, key);
  }
  return out;
}

TEST_F(CliTest, JsaDefaultConfig) {
  const auto r = run("jsa --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "jsa.txt");
  const auto jsa = io::read_jsa(in);
  EXPECT_NEAR(jsa.norm(), 1.0, 1e-9);
  EXPECT_EQ(jsa.grid.n_s(), 512u);
  std::istringstream report(r.out);
  std::string key;
  double value = -1;
  report >> key >> value;
  EXPECT_EQ(key, "discarded_norm");
  EXPECT_LT(value, 0.05);
  EXPECT_TRUE(fs::exists(dir_ / "jsa_abs.txt"));
}

TEST_F(CliTest, JsaImportReExportsIdentically) {
  ASSERT_EQ(run("jsa --out " + (dir_ / "a").string()).code, 0);
  const auto cfg = write("import.cfg", "jsa_source = file\njsa_file = " + (dir_ / "a" / "jsa.txt").string() + "\n");
  const auto r = run("jsa --config " + cfg.string() + " --out " + (dir_ / "b").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "a" / "jsa.txt"), slurp(dir_ / "b" / "jsa.txt"));
}

TEST_F(CliTest, MissingKeyIsConfigError) {
  const auto cfg = write("c.cfg", "jsa_source = file\n");
  const auto r = run("jsa --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error:config:", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("jsa_file"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, UnknownKeyAndMissingFileAreConfigErrors) {
  const auto cfg = write("c.cfg", "pump_colour = blue\n");
  EXPECT_EQ(run("jsa --config " + cfg.string()).code, 2);
  const auto cfg2 = write("d.cfg", "counts_file = /nonexistent/counts.txt\n");
  const auto r = run("metrics --config " + cfg2.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("does not exist"), std::string::npos);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("sweep --degrade 0.5").code, 2);
}

TEST_F(CliTest, NumericErrorExitCode) {
  const auto cfg = write("c.cfg", "grid_points = 16\n");
  const auto r = run("jsa --config " + cfg.string());
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.err.rfind("error:resolution:", 0), 0u) << r.err;
}

TEST_F(CliTest, SweepTableInvariants) {
  const auto r = run("sweep --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "sweep.txt");
  const auto sweep = io::read_sweep(in);
  ASSERT_EQ(sweep.samples.size(), 801u);
  EXPECT_NEAR(sweep.samples.front().tau / kFemto, -400.0, 1e-9);
  EXPECT_NEAR(sweep.samples.back().tau / kFemto, 400.0, 1e-9);
  for (const auto& s : sweep.samples) {
    EXPECT_NEAR(s.purity, s.alpha * s.alpha + s.beta * s.beta + 2 * std::norm(s.d), 1e-12);
  }
}

TEST_F(CliTest, IdentityDegradationMatchesUndegraded) {
  ASSERT_EQ(run("sweep --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run("sweep --degrade 1,0 --out " + (dir_ / "b").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "sweep.txt"), slurp(dir_ / "b" / "sweep.txt"));
}

TEST_F(CliTest, DelayListFollowsDegradationModel) {
  const auto r = run("sweep --delay-fs -25.9,0,25.9 --degrade 0.76,21.3 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "delays.txt");
  const auto at = io::read_sweep(in);
  ASSERT_EQ(at.samples.size(), 3u);

  RunConfig cfg = config_from_values({});
  const auto amps = make_amplitudes(cfg);
  for (const auto& s : at.samples) {
    const auto expect = 0.76 * d_parameter(amps, s.tau - 21.3 * kFemto);
    EXPECT_NEAR(std::abs(s.d - expect), 0.0, 1e-12);
  }
}

TEST_F(CliTest, SimulateThenReconstruct) {
  const auto cfg = write("c.cfg", "target_alpha = 0.5473684210526316\nseed = 7\n");
  const std::string common = " --config " + cfg.string() + " --out " + dir_.string();
  ASSERT_EQ(run("tomo simulate" + common).code, 0);
  const auto r = run("tomo reconstruct --counts " + (dir_ / "counts.txt").string() + common);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_report(dir_ / "metrics.txt");
  EXPECT_GT(m.at("fidelity"), 0.98);
  EXPECT_TRUE(m.count("car"));
  std::ifstream in(dir_ / "rho.txt");
  EXPECT_TRUE(PolarizationDensityMatrix::unchecked(io::read_density_matrix(in)).check().ok());
}

TEST_F(CliTest, NoiselessCountsReconstructExactly) {
  const auto cfg = write("c.cfg", "noiseless = true\nacquisition_s = 100000\n");
  const std::string common = " --config " + cfg.string() + " --out " + dir_.string();
  ASSERT_EQ(run("tomo simulate" + common).code, 0);
  ASSERT_EQ(run("tomo reconstruct --counts " + (dir_ / "counts.txt").string() + common).code, 0);
  EXPECT_GT(read_report(dir_ / "metrics.txt").at("fidelity"), 0.9999);
}

TEST_F(CliTest, ReconstructMissingRowIsFormatError) {
  ASSERT_EQ(run("tomo simulate --out " + dir_.string()).code, 0);
  std::string text = slurp(dir_ / "counts.txt");
  const auto pos = text.find("R Dm ");
  text.erase(pos, text.find('\n', pos) - pos + 1);
  const auto counts = write("broken.txt", text);
  const auto r = run("tomo reconstruct --counts " + counts.string() + " --out " + dir_.string());
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(r.err.rfind("error:format:", 0), 0u);
  EXPECT_NE(r.err.find("(R, Dm)"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulationIsDeterministic) {
  ASSERT_EQ(run("tomo simulate --seed 11 --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run("tomo simulate --seed 11 --out " + (dir_ / "b").string()).code, 0);
  ASSERT_EQ(run("tomo simulate --seed 12 --out " + (dir_ / "c").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "counts.txt"), slurp(dir_ / "b" / "counts.txt"));
  EXPECT_NE(slurp(dir_ / "a" / "counts.txt"), slurp(dir_ / "c" / "counts.txt"));
}

TEST_F(CliTest, MetricsFromMatrixFile) {
  ASSERT_EQ(run("tomo simulate --background 0 --out " + dir_.string()).code, 0);
  const auto r = run("metrics --rho " + (dir_ / "model_rho.txt").string() + " --reference " +
                     (dir_ / "model_rho.txt").string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_report(dir_ / "metrics.txt");
  EXPECT_NEAR(m.at("fidelity"), 1.0, 1e-10);
  EXPECT_NEAR(m.at("concurrence"), 2 * m.at("abs_D"), 1e-6);
}

TEST_F(CliTest, FitRecoversSyntheticModel) {
  RunConfig cfg = config_from_values({});
  const auto amps = make_amplitudes(cfg);
  std::ostringstream obs;
  for (double t : {-30.0, 0.0, 30.0}) {
    const auto d = 0.7 * d_parameter(amps, (t - 15.0) * kFemto);
    obs << t << ' ' << io::format_double(d.real()) << ' ' << io::format_double(d.imag()) << '\n';
  }
  const auto file = write("obs.txt", obs.str());
  const auto r = run("fit --observations " + file.string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto fit = read_report(dir_ / "fit.txt");
  EXPECT_NEAR(fit.at("scale"), 0.7, 2e-3);
  EXPECT_NEAR(fit.at("offset_fs"), 15.0, 0.1);
}

TEST_F(CliTest, FitNeedsTwoRows) {
  const auto file = write("obs.txt", "0 0.3 0.1\n");
  const auto r = run("fit --observations " + file.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error:usage:", 0), 0u) << r.err;
}

TEST_F(CliTest, FitOnMeasuredValuesScalesDownAndShifts) {
  const auto file = write("obs.txt", "0 0.243 0.259\n25.9 0.361 0.132\n-25.9 0.097 0.242\n");
  const auto cfg = write("c.cfg", "target_alpha = 0.5473684210526316\n");
  const auto r = run("fit --config " + cfg.string() + " --observations " + file.string() +
                     " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto fit = read_report(dir_ / "fit.txt");
  EXPECT_LT(fit.at("scale"), 1.0);
  EXPECT_GT(std::abs(fit.at("offset_fs")), 1.0);
}

TEST(Config, FlagsOverrideFile) {
  const auto dir = fs::temp_directory_path() / "polent_cfg_override";
  fs::create_directories(dir);
  const auto path = (dir / "c.cfg").string();
  std::ofstream(path) << "seed = 3\nbackground = 0.02\n";
  const auto c = load_config(path, {{"seed", "9"}});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.background, 0.02);
  fs::remove_all(dir);
}

TEST(Config, RejectsOutOfRangeValues) {
  EXPECT_THROW(config_from_values({{"background", "0.4"}}), Error);
  EXPECT_THROW(config_from_values({{"degrade_scale", "1.5"}}), Error);
  EXPECT_THROW(config_from_values({{"crystal_length_mm", "-1"}}), Error);
  EXPECT_THROW(config_from_values({{"delays_fs", "10,5"}}), Error);
  EXPECT_THROW(config_from_values({{"seed", "x"}}), Error);
}

}  // namespace
}  // namespace polent::cli
