#include <filesystem>
#include <functional>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "kicktop/error.hpp"
#include "kicktop/experiments.hpp"

namespace {

using namespace kicktop;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("kicktop_test_" + name)) {
    fs::remove_all(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error_field(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(Registry, SevenExperiments) {
  const auto& all = list_experiments();
  ASSERT_EQ(all.size(), 7u);
  for (const auto& info : all) {
    EXPECT_EQ(to_string(info.kind), info.name);
    EXPECT_EQ(experiment_from_string(info.name), info.kind);
  }
  EXPECT_EQ(all[static_cast<int>(ExperimentKind::eigvec_q)].reproduces, "Fig. 10");
  EXPECT_FALSE(experiment_from_string("nope").has_value());
}

TEST(Config, DefaultsValidateAndRoundTrip) {
  for (const auto& info : list_experiments()) {
    const auto c = default_config(info.kind);
    EXPECT_NO_THROW(validate(c)) << info.name;
    EXPECT_EQ(parse_config(serialize(c)), c) << info.name;
  }
}

TEST(Config, RoundTripOfEditedValues) {
  auto c = default_config(ExperimentKind::stability_scan);
  c.targets.push_back({0.123456789012345, -2.5, 2, 1.7, 0.5, 3.25});
  c.k = {0.1, 1.0 / 3.0};
  c.seed = 18446744073709551615ull;
  c.parity_resolved = true;
  c.layout = classical::SeedLayout::random;
  c.entropy_unit = EntropyUnit::bits;
  c.out = "some dir/x";
  EXPECT_EQ(parse_config(serialize(c)), c);
}

TEST(Config, ParsesFilesWithCommentsAndPiExpressions) {
  const auto c = parse_config(R"(
# sweep around the first bifurcation
[experiment]
name = sweep-k
[physics]
p = pi/2, 1.7   # two panels
phi0 = -pi/2
k_min = 1
k_max = 2*pi
)");
  EXPECT_EQ(c.experiment, ExperimentKind::sweep_k);
  ASSERT_EQ(c.p.size(), 2u);
  EXPECT_DOUBLE_EQ(c.p[0], kPi / 2);
  EXPECT_DOUBLE_EQ(c.phi0[0], -kPi / 2);
  EXPECT_DOUBLE_EQ(c.k_max, 2 * kPi);
  EXPECT_EQ(c.j, std::vector<double>{120});
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(config_error_field([] { parse_config("[physics]\nk = abc\n", ExperimentKind::table1); }),
            "physics.k");
  EXPECT_EQ(config_error_field([] { parse_config("[physics]\nbogus = 1\n", ExperimentKind::table1); }),
            "physics.bogus");
  EXPECT_EQ(config_error_field([] { parse_config("[experiment]\nname = nope\n"); }),
            "experiment.name");
  EXPECT_EQ(config_error_field([] { parse_config("[physics]\nk = 1\n"); }), "experiment.name");
  EXPECT_EQ(config_error_field(
                [] { parse_config("[experiment]\nname = table1\n", ExperimentKind::portrait); }),
            "experiment.name");
  EXPECT_EQ(config_error_field([] {
              auto c = default_config(ExperimentKind::table1);
              c.j = {0.3};
              validate(c);
            }),
            "physics.j");
  EXPECT_EQ(config_error_field([] {
              auto c = default_config(ExperimentKind::scaling_j);
              c.j_count = 3;
              validate(c);
            }),
            "physics.j_count");
  EXPECT_EQ(config_error_field([] {
              auto c = default_config(ExperimentKind::table1);
              c.threads = 0;
              validate(c);
            }),
            "run.threads");
}

TEST(Config, OverridesAndEnvironment) {
  auto c = default_config(ExperimentKind::table1);
  apply_override(c, "physics.j=10, 20");
  apply_override(c, "run.seed = 42");
  EXPECT_EQ(c.j, (std::vector<double>{10, 20}));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(config_error_field([&] { apply_override(c, "experiment.name=portrait"); }),
            "experiment.name");
  EXPECT_THROW(apply_override(c, "physics.steps"), ConfigError);
  apply_environment(c, {{"KICKTOP_PHYSICS_STEPS", "77"}, {"KICKTOP_ENSEMBLE_N_SAMPLES", "4"},
                        {"UNRELATED", "x"}});
  EXPECT_EQ(c.steps, 77);
  EXPECT_EQ(c.n_samples, 4);
}

TEST(Run, InvalidConfigWritesNothing) {
  ScratchDir dir("invalid");
  auto c = default_config(ExperimentKind::sweep_k);
  c.k_max = 0.0;
  c.out = dir.path().string();
  EXPECT_EQ(config_error_field([&] { run(c); }), "physics.k_max");
  EXPECT_FALSE(fs::exists(dir.path()));
}

ExperimentConfig small_table1(const fs::path& out, unsigned threads) {
  auto c = default_config(ExperimentKind::table1);
  c.j = {3, 4};
  c.steps = 20;
  c.n_samples = 2;
  c.threads = threads;
  c.out = out.string();
  return c;
}

TEST(Run, ReproducibleAcrossRunsAndThreads) {
  ScratchDir a("serial"), b("parallel");
  const auto first = run(small_table1(a.path(), 1));
  const auto second = run(small_table1(b.path(), 3));
  ASSERT_EQ(first.files.size(), second.files.size());
  for (std::size_t i = 0; i < first.files.size(); ++i) {
    const auto name = first.files[i].filename();
    EXPECT_EQ(name, second.files[i].filename());
    if (name == "manifest.txt") continue;
    EXPECT_EQ(slurp(first.files[i]), slurp(second.files[i])) << name;
  }
  const auto again = run(small_table1(a.path(), 1));
  for (std::size_t i = 0; i + 1 < again.files.size(); ++i) {
    EXPECT_EQ(slurp(again.files[i]), slurp(second.files[i]));
  }
  const std::string manifest = slurp(a.path() / "manifest.txt");
  EXPECT_NE(manifest.find("version = " + version()), std::string::npos);
  EXPECT_NE(manifest.find("seed = 1"), std::string::npos);
  EXPECT_NE(manifest.find("name = table1"), std::string::npos);
}

TEST(Run, EveryExperimentProducesItsFiles) {
  ScratchDir dir("all");
  auto make = [&](ExperimentKind kind) {
    auto c = default_config(kind);
    c.out = (dir.path() / to_string(kind)).string();
    return c;
  };
  auto portrait = make(ExperimentKind::portrait);
  portrait.k = {1.0};
  portrait.n_seeds = 4;
  portrait.n_steps = 10;
  auto sweep = make(ExperimentKind::sweep_k);
  sweep.j = {4};
  sweep.k_min = 1.0;
  sweep.k_max = 2.0;
  sweep.k_step = 0.5;
  sweep.steps = 10;
  auto scaling = make(ExperimentKind::scaling_j);
  scaling.j_min = 2;
  scaling.j_max = 8;
  scaling.j_count = 6;
  scaling.steps = 10;
  auto coe = make(ExperimentKind::coe_compare);
  coe.j = {3};
  coe.steps = 10;
  coe.n_samples = 2;
  auto eig = make(ExperimentKind::eigvec_q);
  eig.j = {1, 2};
  eig.n_samples = 3;
  eig.n_k_values = 3;
  auto stab = make(ExperimentKind::stability_scan);
  stab.targets.resize(1);

  const std::vector<std::pair<ExperimentConfig, std::vector<std::string>>> cases{
      {portrait, {"portrait_0.csv", "portrait_plot.csv"}},
      {sweep, {"sweep_k.csv", "jumps.csv", "sweep_k_plot.csv"}},
      {scaling, {"scaling_j.csv", "fits.csv", "scaling_j_plot.csv"}},
      {coe, {"coe_compare_floquet.csv", "coe_compare.csv", "coe_compare_plot.csv"}},
      {eig, {"eigvec_q.csv", "eigvec_q_plot.csv"}},
      {stab, {"stability.csv"}},
  };
  for (const auto& [config, expected] : cases) {
    const auto result = run(config);
    for (const auto& name : expected) {
      EXPECT_TRUE(fs::exists(fs::path(config.out) / name)) << name;
    }
    EXPECT_TRUE(fs::exists(fs::path(config.out) / "manifest.txt"));
    EXPECT_EQ(result.files.size(), expected.size() + 1);
  }
  const std::string stability = slurp(dir.path() / "stability-scan" / "stability.csv");
  EXPECT_EQ(stability.substr(0, stability.find('\n')),
            "theta0,phi0,period,p,k_lo,k_hi,k_b,status");
}

}  // namespace
