#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dimerhole/error.hpp"
#include "dimerhole/experiment.hpp"

using namespace dimerhole;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig smoke() {
  return load_config(std::string(DIMERHOLE_SOURCE_DIR) + "/configs/annulus_smoke.json");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dimerhole_experiment_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Format, RoundTripDecimal) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Experiment, ShippedSmokeRunWritesManifest) {
  RunOptions o;
  o.output_dir = scratch("smoke").string();
  const ExperimentResult r = run_experiment(smoke(), o);
  ASSERT_EQ(r.scales.size(), 2u);
  const auto manifest = nlohmann::json::parse(slurp(fs::path(*o.output_dir) / "manifest.json"));
  EXPECT_EQ(manifest["config_hash"], r.config_hash);
  std::set<std::string> names;
  for (const auto& a : manifest["artifacts"]) {
    const std::string path = a["path"];
    names.insert(path);
    const std::string body = slurp(fs::path(*o.output_dir) / path);
    EXPECT_EQ(sha256_hex(body), a["sha256"]) << path;
    EXPECT_EQ(body.size(), a["bytes"].get<std::size_t>()) << path;
    if (path != "config.json") {
      EXPECT_NE(body.find(r.config_hash), std::string::npos) << path;
    }
  }
  for (const char* want : {"region_0.txt", "surface_0.json", "moments_0.json", "moments_0.txt",
                           "gof_0.json", "gof_0.txt", "samples_0.csv", "heights_1.csv",
                           "render_1.svg", "summary.json"}) {
    EXPECT_TRUE(names.count(want)) << want;
  }
  // Every file in the directory apart from the manifest is listed.
  for (const auto& entry : fs::directory_iterator(*o.output_dir)) {
    const std::string n = entry.path().filename().string();
    if (n != "manifest.json") EXPECT_TRUE(names.count(n)) << n;
  }
  ASSERT_TRUE(r.scales[1].gof.has_value());
  EXPECT_LT(r.scales[1].gof->total_variation, 0.15);
  EXPECT_EQ(manifest["pass"], r.pass);
}

TEST(Experiment, RerunAndWorkerCountGiveIdenticalArtifacts) {
  ExperimentConfig c = smoke();
  c.scales = {0.05};
  c.samples = 120;
  c.gates.min_moment_samples = c.gates.min_gof_samples = 100;
  RunOptions a, b, d;
  a.output_dir = scratch("a").string();
  b.output_dir = scratch("b").string();
  d.output_dir = scratch("d").string();
  d.threads = 3;
  const auto ra = run_experiment(c, a), rb = run_experiment(c, b), rd = run_experiment(c, d);
  EXPECT_EQ(slurp(fs::path(*a.output_dir) / "samples_0.csv"),
            slurp(fs::path(*b.output_dir) / "samples_0.csv"));
  ASSERT_EQ(ra.artifacts.size(), rd.artifacts.size());
  for (std::size_t i = 0; i < ra.artifacts.size(); ++i) {
    EXPECT_EQ(ra.artifacts[i].path, rb.artifacts[i].path);
    EXPECT_EQ(ra.artifacts[i].sha256, rb.artifacts[i].sha256) << ra.artifacts[i].path;
    EXPECT_EQ(ra.artifacts[i].sha256, rd.artifacts[i].sha256) << ra.artifacts[i].path;
  }
  EXPECT_EQ(slurp(fs::path(*a.output_dir) / "manifest.json"),
            slurp(fs::path(*d.output_dir) / "manifest.json"));
  // A different master seed changes the samples.
  RunOptions e;
  e.output_dir = scratch("e").string();
  e.seed = c.seed + 1;
  run_experiment(c, e);
  EXPECT_NE(slurp(fs::path(*a.output_dir) / "samples_0.csv"),
            slurp(fs::path(*e.output_dir) / "samples_0.csv"));
}

TEST(Experiment, ErrorsCarryStageLabels) {
  ExperimentConfig c = smoke();
  c.scales = {0.05};
  c.samples = 20;
  RunOptions o;
  o.output_dir = scratch("err").string();
  try {
    run_experiment(c, o);
    FAIL() << "expected InsufficientSamples";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientSamples);
    EXPECT_NE(std::string(e.what()).find("verification (scale 0"), std::string::npos) << e.what();
  }
  c.queries = {{{0.5, 0.5}, 0.05}};  // inside the hole
  try {
    run_experiment(c, o);
    FAIL() << "expected a prediction error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("predictions (scale 0"), std::string::npos) << e.what();
  }
  RunOptions bad = o;
  bad.eps_index = 4;
  EXPECT_THROW(run_experiment(c, bad), Error);
}
