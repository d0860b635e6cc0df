#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ssir/experiments.hpp"

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("ssir_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ssir::ExperimentConfig preset(const std::string& id, const fs::path& out) {
  auto cfg = ssir::parse_config(ssir::preset_text(id));
  cfg.output_dir = out.string();
  return cfg;
}

TEST(RunThreshold, PresetsClassifyAndWriteReports) {
  std::ostringstream log;
  const auto dir1 = fresh_dir("thr1");
  const auto r1 = ssir::run_threshold(preset("ex1", dir1), log);
  EXPECT_EQ(r1.classification, ssir::Classification::Extinction);
  const auto csv = slurp(dir1 / "report.csv");
  EXPECT_EQ(csv.rfind("lambda,quad_error,mc_lambda,mc_halfwidth,r,classification\n", 0), 0u);
  EXPECT_NE(csv.find(",Extinction\n"), std::string::npos);
  EXPECT_NE(slurp(dir1 / "report.txt").find("classification = Extinction"), std::string::npos);

  const auto dir2 = fresh_dir("thr2");
  const auto r2 = ssir::run_threshold(preset("ex2", dir2), log);
  EXPECT_EQ(r2.classification, ssir::Classification::Permanence);
  EXPECT_NEAR(r2.lambda, 3.3611, 0.05 * 3.3611);
  EXPECT_NE(log.str().find("classification = Permanence"), std::string::npos);
}

TEST(RunReplicate, ExtinctionManifest) {
  const auto dir = fresh_dir("rep1");
  ssir::Overrides o;
  o.out = dir.string();
  std::ostringstream log;
  const auto files = ssir::run_replicate("ex1", o, log);
  ASSERT_EQ(files.size(), 3u);
  std::set<std::string> names;
  for (const auto& f : fs::directory_iterator(dir)) names.insert(f.path().filename().string());
  EXPECT_EQ(names, (std::set<std::string>{"trajectories.svg", "i_decay.svg", "report.csv"}));
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f));
  const auto svg = slurp(dir / "i_decay.svg");
  EXPECT_NE(svg.find("<!-- provenance: replicate ex1;"), std::string::npos);
  EXPECT_NE(svg.find("master_seed=1001"), std::string::npos);
  EXPECT_EQ(svg.find("--", svg.find("<!--") + 4), svg.find("-->"));
}

TEST(RunReplicate, ArtifactsAreByteIdentical) {
  ssir::Overrides o;
  std::ostringstream log;
  const auto a = fresh_dir("rep_a"), b = fresh_dir("rep_b");
  o.out = a.string();
  ssir::run_replicate("ex1", o, log);
  o.out = b.string();
  ssir::run_replicate("ex1", o, log);
  for (const char* name : {"trajectories.svg", "i_decay.svg", "report.csv"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(RunReplicate, ClassificationIsSeedRobust) {
  std::ostringstream log;
  std::vector<std::string> classes;
  for (std::uint64_t seed : {5u, 6u}) {
    ssir::Overrides o;
    o.seed = seed;
    o.out = fresh_dir("rep_seed" + std::to_string(seed)).string();
    ssir::run_replicate("ex1", o, log);
    const auto csv = slurp(fs::path(*o.out) / "report.csv");
    classes.push_back(csv.substr(csv.rfind(',') + 1));
  }
  EXPECT_EQ(classes[0], "Extinction\n");
  EXPECT_EQ(classes[0], classes[1]);
}

TEST(RunReplicate, PermanenceHeatmapMassSumsToOne) {
  ssir::Overrides o;
  o.out = fresh_dir("rep2").string();
  o.paths = 4;
  o.horizon = 150;
  std::ostringstream log;
  const auto files = ssir::run_replicate("ex2", o, log);
  EXPECT_EQ(files.size(), 4u);
  std::istringstream csv(slurp(fs::path(*o.out) / "histogram.csv"));
  std::string line;
  double total = 0.0;
  std::size_t cells = 0;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 's') continue;
    total += std::stod(line.substr(line.rfind(',') + 1));
    ++cells;
  }
  EXPECT_EQ(cells, 10000u);
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NE(slurp(fs::path(*o.out) / "occupation.svg").find("<!-- provenance: replicate ex2;"), std::string::npos);
}

TEST(RunReplicate, UnknownExample) {
  std::ostringstream log;
  EXPECT_THROW(ssir::run_replicate("ex3", {}, log), ssir::ConfigError);
}

TEST(RunClassify, NearCriticalModelSkipsSuite) {
  auto cfg = preset("ex1", fresh_dir("near"));
  cfg.incidence_kind = ssir::IncidenceKind::bilinear;
  cfg.coefficients = {{"beta", 0.5}};  // c2 (a − 1) / b
  cfg.mc_samples = 10000;
  std::ostringstream log;
  const auto out = ssir::run_classify(cfg, log);
  EXPECT_EQ(out.threshold.classification, ssir::Classification::Indeterminate);
  EXPECT_EQ(out.verdict, "NEAR-CRITICAL");
  EXPECT_FALSE(out.extinction);
  EXPECT_FALSE(out.permanence);
}

TEST(RunClassify, ExtinctionPresetAgrees) {
  const auto dir = fresh_dir("cls1");
  std::ostringstream log;
  const auto out = ssir::run_classify(preset("ex1", dir), log);
  EXPECT_EQ(out.threshold.classification, ssir::Classification::Extinction);
  ASSERT_TRUE(out.extinction);
  EXPECT_EQ(out.verdict, "AGREE") << log.str();
  EXPECT_NE(slurp(dir / "classify.txt").find("verdict = AGREE"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "slopes.csv"));
  EXPECT_TRUE(fs::exists(dir / "gap_slopes.csv"));
}

TEST(RunClassify, PermanencePresetAgrees) {
  const auto dir = fresh_dir("cls2");
  std::ostringstream log;
  const auto out = ssir::run_classify(preset("ex2", dir), log);
  EXPECT_EQ(out.threshold.classification, ssir::Classification::Permanence);
  ASSERT_TRUE(out.permanence);
  EXPECT_EQ(out.verdict, "AGREE") << log.str();
  for (const char* name : {"report.csv", "classify.txt", "slopes.csv", "histogram.csv", "moments.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
}

TEST(RunSimulate, WritesOneCsvPerPath) {
  auto cfg = preset("ex1", fresh_dir("sim"));
  cfg.n_paths = 3;
  cfg.horizon = 20;
  std::ostringstream log;
  ssir::run_simulate(cfg, log);
  const fs::path dir(cfg.output_dir);
  for (const char* name : {"path_0000.csv", "path_0001.csv", "path_0002.csv", "slopes.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  EXPECT_NE(slurp(dir / "path_0001.csv").find("# trajectory=1\n"), std::string::npos);
}

TEST(RunValidateModel, ReportsClauses) {
  std::ostringstream log;
  const auto report = ssir::run_validate_model(ssir::parse_config(ssir::preset_text("ex2")), log);
  EXPECT_TRUE(report.all_passed());
  EXPECT_NE(log.str().find("assumption = satisfied"), std::string::npos);
}

}  // namespace
