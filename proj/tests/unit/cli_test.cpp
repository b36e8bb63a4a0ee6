#include <enclosure/error.hpp>
#include <enclosure_cli/commands.hpp>
#include <enclosure_cli/config.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace enclosure;
using namespace enclosure::cli;

namespace {

namespace fs = std::filesystem;

const char* kBase = R"({
  "domain": {"type": "unit_disk"},
  "background": {"sigma0": 1.0, "eps0": 1.0, "omega": 1.0},
  "inclusions": [
    {"shape": {"type": "disk", "center": [0.3, 0.0], "radius": 0.2},
     "alpha": [1.0, 0.0, 1.0], "beta": [0.0, 0.0, 0.0]}
  ],
  "sweep": {"n_directions": 8, "tau_min": 2.0, "tau_max": 9.0, "n_tau": 8},
  "mesh": {"target_h": 0.05}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos == std::string::npos) ADD_FAILURE() << "pattern not found: " << from;
  else s.replace(pos, from.size(), to);
  return s;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
    return e.what();
  }
  ADD_FAILURE() << "config accepted";
  return {};
}

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

class CliRun : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("enclosure_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& text) {
    const auto p = dir_ / "config.json";
    std::ofstream(p) << text;
    return p;
  }

  Invocation run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "enclosure-kit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST(Config, ParsesAllFields) {
  const auto c = parse_config(kBase);
  EXPECT_TRUE(std::holds_alternative<UnitDisk>(c.domain));
  EXPECT_EQ(c.scene.inclusions.size(), 1u);
  EXPECT_EQ(c.scene.inclusions[0].alpha, SymMat2::identity());
  EXPECT_EQ(c.sweep.n_directions, 8);
  EXPECT_EQ(c.sweep.taus().size(), 8u);
  EXPECT_DOUBLE_EQ(c.target_h, 0.05);
  EXPECT_EQ(c.output_dir, "enclosure-out");
}

TEST(Config, RoundTripIsIdempotent) {
  std::vector<std::string> texts = {kBase};
  for (const auto& e : fs::directory_iterator(ENCLOSURE_SCENARIO_DIR)) {
    std::ifstream in(e.path());
    std::stringstream ss;
    ss << in.rdbuf();
    texts.push_back(ss.str());
  }
  ASSERT_GE(texts.size(), 6u);
  for (const auto& t : texts) {
    const std::string once = serialize(parse_config(t));
    const std::string twice = serialize(parse_config(once));
    EXPECT_EQ(once, twice);
  }
  // Rectangle domain, ellipse and polygon shapes.
  const std::string other = R"({
    "domain": {"type": "rectangle", "x_min": 0, "x_max": 2, "y_min": 0, "y_max": 1},
    "background": {"sigma0": 0.0, "eps0": 2.0, "omega": 3.0},
    "inclusions": [
      {"shape": {"type": "ellipse", "center": [0.6, 0.5], "semi_a": 0.2, "semi_b": 0.1},
       "alpha": [0.1, 0.05, 0.2], "beta": [0.5, 0.0, 0.5]},
      {"shape": {"type": "polygon", "vertices": [[1.2, 0.4], [1.5, 0.4], [1.4, 0.6]]},
       "alpha": [0.3, 0.0, 0.3], "beta": [0.0, 0.0, 0.0]}
    ],
    "output_dir": "somewhere/else"
  })";
  const std::string once = serialize(parse_config(other));
  EXPECT_EQ(once, serialize(parse_config(once)));
}

TEST(Config, Rejections) {
  EXPECT_NE(config_error(replace(kBase, R"("mesh")", R"("extra": 1, "mesh")")).find("unknown key \"extra\""),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, R"("radius": 0.2)", R"("radius": 0.2, "colour": "red")"))
                .find("inclusions[0].shape"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, "[1.0, 0.0, 1.0]", "[[1.0, 0.0], [0.0, 1.0]]")).find("full 2x2"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, "[1.0, 0.0, 1.0]", "[1.0, 0.0, 0.0, 1.0]")).find("full 2x2"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, R"("eps0": 1.0)", R"("eps0": 0.0)")).find("eps0"), std::string::npos);
  EXPECT_NE(config_error(replace(kBase, R"("eps0": 1.0)", R"("eps0": "one")")).find("background.eps0"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, R"("radius": 0.2)", R"("radius": 0.6)")).find("inclusions[0].shape"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, R"("n_directions": 8)", R"("n_directions": 4)")).find("n_directions"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, R"("type": "unit_disk")", R"("type": "torus")")).find("torus"),
            std::string::npos);
  EXPECT_NE(config_error(replace(kBase, R"("background": {"sigma0": 1.0, "eps0": 1.0, "omega": 1.0},)", ""))
                .find("background"),
            std::string::npos);
  // Syntax errors carry the position.
  EXPECT_NE(config_error("{\n  \"domain\": {\"type\": \"unit_disk\"},\n  oops\n}").find("line 3"),
            std::string::npos);
}

TEST_F(CliRun, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate", "--config", "x.json"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"reduce"}).code, kExitUsage);
  const auto missing = run_cli({"reduce", "--config", (dir_ / "missing.json").string()});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_NE(missing.err.find("cannot read"), std::string::npos);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST_F(CliRun, ReducePrintsCoefficients) {
  const auto r = run_cli({"reduce", "--config", write_config(kBase).string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("a = [0.5, 0, 0.5], b = [-0.5, 0, -0.5]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("P = 0.5, Q = 0.5"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "reduce.json").find("\"inclusions\""), std::string::npos);

  const auto z = run_cli({"reduce", "--config",
                          write_config(replace(kBase, "[1.0, 0.0, 1.0]", "[0.0, 0.0, 0.0]")).string(), "--out",
                          dir_.string()});
  EXPECT_NE(z.out.find("a = [0, 0, 0], b = [0, 0, 0]"), std::string::npos) << z.out;

  const auto bad = run_cli({"reduce", "--config",
                            write_config(replace(kBase, R"("eps0": 1.0)", R"("eps0": -1.0)")).string()});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("eps0"), std::string::npos);
}

TEST_F(CliRun, CheckExitCodes) {
  auto r = run_cli({"check", "--config", write_config(kBase).string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(slurp(dir_ / "check.json").find("\"applicable\""), std::string::npos);

  const std::string above = replace(replace(replace(kBase, "[1.0, 0.0, 1.0]", "[-0.5, 0.0, -0.5]"),
                                            "\"beta\": [0.0, 0.0, 0.0]", "\"beta\": [0.25, 0.0, 0.25]"),
                                    R"("omega": 1.0)", R"("omega": 1.3333333333333333)");
  r = run_cli({"check", "--config", write_config(above).string(), "--out", dir_.string(), "--direction", "0"});
  EXPECT_EQ(r.code, kExitRegimeEmpty);
  EXPECT_NE(r.out.find("no applicable regime for direction 0"), std::string::npos);

  const std::string empty = replace(kBase, R"({"shape": {"type": "disk", "center": [0.3, 0.0], "radius": 0.2},
     "alpha": [1.0, 0.0, 1.0], "beta": [0.0, 0.0, 0.0]})", "");
  r = run_cli({"check", "--config", write_config(empty).string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, kExitRegimeEmpty);
  EXPECT_NE(r.err.find("direction 0"), std::string::npos);

  r = run_cli({"check", "--config", write_config(kBase).string(), "--direction", "99"});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST_F(CliRun, SweepWritesCsvTrio) {
  const auto cfg = write_config(kBase).string();
  const auto r = run_cli({"sweep", "--config", cfg, "--out", (dir_ / "a").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("max |h_hat - h_exact| = "), std::string::npos);
  const std::string ind = slurp(dir_ / "a" / "indicator.csv");
  const std::string sup = slurp(dir_ / "a" / "support.csv");
  const std::string hull = slurp(dir_ / "a" / "hull.csv");
  EXPECT_EQ(ind.substr(0, ind.find('\n')), "direction_index,theta_x,theta_y,tau,t,log_abs_I,sign");
  EXPECT_EQ(sup.substr(0, sup.find('\n')),
            "direction_index,theta_x,theta_y,h_hat,h_exact,fit_residual,regime_flags");
  EXPECT_EQ(hull.substr(0, hull.find('\n')), "vertex,x,y");
  EXPECT_EQ(std::count(ind.begin(), ind.end(), '\n'), 1 + 8 * 8);
  EXPECT_EQ(std::count(sup.begin(), sup.end(), '\n'), 1 + 8);
  EXPECT_NE(sup.find("positive_jump;positive_jump_relative_contrast"), std::string::npos);

  ASSERT_EQ(run_cli({"sweep", "--config", cfg, "--out", (dir_ / "b").string()}).code, kExitOk);
  EXPECT_EQ(ind, slurp(dir_ / "b" / "indicator.csv"));
  EXPECT_EQ(sup, slurp(dir_ / "b" / "support.csv"));
  EXPECT_EQ(hull, slurp(dir_ / "b" / "hull.csv"));

  const auto one = run_cli({"sweep", "--config", cfg, "--out", (dir_ / "c").string(), "--direction", "2"});
  ASSERT_EQ(one.code, kExitOk) << one.err;
  const std::string sup1 = slurp(dir_ / "c" / "support.csv");
  EXPECT_EQ(std::count(sup1.begin(), sup1.end(), '\n'), 2);
  EXPECT_FALSE(fs::exists(dir_ / "c" / "hull.csv"));
}

TEST_F(CliRun, SweepGateAndEmpty) {
  const auto r = run_cli({"sweep", "--config",
                          write_config(replace(kBase, R"("tau_max": 9.0)", R"("tau_max": 40.0)")).string(), "--out",
                          dir_.string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("largest admissible tau"), std::string::npos) << r.err;

  const std::string empty = replace(kBase, R"({"shape": {"type": "disk", "center": [0.3, 0.0], "radius": 0.2},
     "alpha": [1.0, 0.0, 1.0], "beta": [0.0, 0.0, 0.0]})", "");
  const auto e = run_cli({"sweep", "--config", write_config(empty).string(), "--out", dir_.string()});
  EXPECT_EQ(e.code, kExitOk) << e.err;
  EXPECT_NE(e.out.find("no inclusion detected"), std::string::npos);
}

TEST_F(CliRun, MeshDump) {
  const std::string square = replace(kBase, R"({"type": "unit_disk"})",
                                     R"({"type": "rectangle", "x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1})");
  const auto cfg = replace(replace(square, R"("target_h": 0.05)", R"("target_h": 0.5)"), R"("center": [0.3, 0.0])",
                           R"("center": [0.5, 0.5])");
  const auto r = run_cli({"mesh-dump", "--config", write_config(cfg).string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("vertices: 25"), std::string::npos);
  EXPECT_NE(r.out.find("triangles: 32"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "vertices.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "triangles.csv"));
}
