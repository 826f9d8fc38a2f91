#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sprdm/commands.hpp"
#include "sprdm/datasets.hpp"
#include "sprdm/io.hpp"

using namespace sprdm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("sprdm_test_" + tag + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

const char* kPipelineConfig = R"(
[run]
seed = 7
[dataset]
kind = example42
sequences = 12
length = 12
[split]
train = 8
validation = 2
test = 2
[model]
state_dim = 3
window = 2
[train]
updates_per_timestep = 30
mixing_iterations = 20
learning_rate = 0.01
[baselines]
linear_orders = 2
hmm_states = 2
hmm_iterations = 5
[evaluate]
horizons = 1,2,4
min_prefix = 5
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("generate writes splits, manifest and matching hashes") {
  TempDir dir("generate");
  const RunConfig cfg = parse_run_config(kPipelineConfig);
  std::ostringstream log;
  cmd_generate(cfg, dir.str(), log);

  for (const char* name : {"train.seq", "validation.seq", "test.seq", "normalization.txt",
                           "manifest.txt"}) {
    CHECK(fs::exists(dir.path / name));
  }
  CHECK(load_sequences((dir.path / "train.seq").string()).size() == 8);
  CHECK(load_sequences((dir.path / "test.seq").string()).size() == 2);

  const std::string manifest = slurp(dir.path / "manifest.txt");
  for (const char* name : {"train.seq", "validation.seq", "test.seq"}) {
    const std::string expect =
        std::string("file.") + name + " = fnv1a64:" + file_hash_hex((dir.path / name).string());
    CHECK(manifest.find(expect) != std::string::npos);
  }

  SUBCASE("rerun is byte-identical") {
    TempDir dir2("generate2");
    std::ostringstream log2;
    cmd_generate(cfg, dir2.str(), log2);
    for (const char* name : {"train.seq", "validation.seq", "test.seq", "manifest.txt"}) {
      CHECK(slurp(dir.path / name) == slurp(dir2.path / name));
    }
  }

  SUBCASE("missing required keys are named") {
    RunConfig no_seed = cfg;
    no_seed.present.erase("run.seed");
    std::ostringstream sink;
    CHECK_THROWS_WITH_AS(cmd_generate(no_seed, dir.str(), sink),
                         doctest::Contains("run.seed"), InvalidConfig);
  }

  SUBCASE("split counts must sum to the sequence count") {
    RunConfig bad = cfg;
    bad.split_test = 3;
    std::ostringstream sink;
    CHECK_THROWS_AS(cmd_generate(bad, dir.str(), sink), InvalidConfig);
  }
}

TEST_CASE("train then evaluate produce model and reports") {
  TempDir dir("pipeline");
  const RunConfig cfg = parse_run_config(kPipelineConfig);
  std::ostringstream log;
  cmd_generate(cfg, dir.str(), log);
  cmd_train(cfg, dir.str(), std::nullopt, log);

  CHECK(fs::exists(dir.path / "spr_model.bin"));
  CHECK(fs::exists(dir.path / "train_report.csv"));
  const std::string report = slurp(dir.path / "train_report.csv");
  CHECK(report.rfind("stage,iteration,loss\n", 0) == 0);
  CHECK(report.find("mixing") != std::string::npos);

  const SprParams model = load_spr_model((dir.path / "spr_model.bin").string());
  CHECK(model.state_dim == 3);

  cmd_evaluate(cfg, dir.str(), std::nullopt, log);
  for (const char* name :
       {"report_spr.csv", "report_linear2.csv", "report_hmm2.csv", "report_average.csv",
        "comparison.csv"}) {
    CHECK(fs::exists(dir.path / name));
  }
  const std::string comparison = slurp(dir.path / "comparison.csv");
  CHECK(comparison.rfind("horizon,SPR,LINEAR-2,HMM-2,AVERAGE\n", 0) == 0);

  SUBCASE("predict matches the library on the model file") {
    const auto test = load_sequences((dir.path / "test.seq").string());
    std::ostringstream out;
    cmd_predict((dir.path / "spr_model.bin").string(), (dir.path / "test.seq").string(), 4, 1,
                0, out);
    const Vector direct = predict_horizon(model, test[0], 4, 1);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", direct[0]);
    CHECK(out.str() == std::string(buf) + "\n");

    std::ostringstream again;
    cmd_predict((dir.path / "spr_model.bin").string(), (dir.path / "test.seq").string(), 4, 1,
                0, again);
    CHECK(again.str() == out.str());
  }

  SUBCASE("predict rejects out-of-range prefixes with the bound in the message") {
    std::ostringstream out;
    CHECK_THROWS_WITH_AS(cmd_predict((dir.path / "spr_model.bin").string(),
                                     (dir.path / "test.seq").string(), 40, 1, 0, out),
                         doctest::Contains("[1, 12]"), OutOfRange);
  }

  SUBCASE("evaluate without a model file fails") {
    TempDir empty("nomodel");
    std::ostringstream sink;
    cmd_generate(cfg, empty.str(), sink);
    CHECK_THROWS_AS(cmd_evaluate(cfg, empty.str(), std::nullopt, sink), IoError);
  }

  SUBCASE("train without data fails") {
    TempDir empty("nodata");
    std::ostringstream sink;
    CHECK_THROWS_AS(cmd_train(cfg, empty.str(), std::nullopt, sink), IoError);
  }
}

TEST_CASE("corrupt dataset files surface parse errors") {
  TempDir dir("corrupt");
  const RunConfig cfg = parse_run_config(kPipelineConfig);
  std::ostringstream log;
  cmd_generate(cfg, dir.str(), log);
  std::ofstream(dir.path / "train.seq", std::ios::trunc) << "#SEQ x 2 1\n1\nnot_a_number\n";
  CHECK_THROWS_AS(cmd_train(cfg, dir.str(), std::nullopt, log), ParseError);
}

TEST_CASE("full pipeline is byte-identical across reruns") {
  const RunConfig cfg = parse_run_config(kPipelineConfig);
  TempDir a("det_a"), b("det_b");
  std::ostringstream log;
  for (const auto& dir : {a.str(), b.str()}) {
    cmd_generate(cfg, dir, log);
    cmd_train(cfg, dir, std::nullopt, log);
    cmd_evaluate(cfg, dir, std::nullopt, log);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a.path)) {
    const auto name = entry.path().filename();
    CHECK(read_file(entry.path().string()) == read_file((b.path / name).string()));
    ++compared;
  }
  CHECK(compared >= 9);
}
