#include "sprdm/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "sprdm/evaluation.hpp"
#include "sprdm/io.hpp"

namespace sprdm {

namespace {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failure on '" + path + "'");
}

std::string kind_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::example41: return "example41";
    case GeneratorKind::example42: return "example42";
    case GeneratorKind::nonlinear_cts: return "nonlinear_cts";
  }
  return "?";
}

std::vector<Sequence> load_split(const std::string& out_dir, const std::string& name,
                                 bool required) {
  const std::string path = join_path(out_dir, name);
  if (!fs::exists(path)) {
    if (required) throw IoError("dataset file '" + path + "' not found; run generate first");
    return {};
  }
  return load_sequences(path);
}

std::string sanitize_model_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

void apply_seed_override(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.dataset.seed = seed;
  cfg.train.seed = seed;
  cfg.present.insert("run.seed");
}

std::string file_hash_hex(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void cmd_generate(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  cfg.require("run.seed");
  cfg.require("dataset.kind");
  cfg.require("dataset.sequences");
  if (cfg.dataset.kind != GeneratorKind::example41) cfg.require("dataset.length");
  if (cfg.dataset.kind == GeneratorKind::nonlinear_cts) cfg.require("dataset.dim");
  cfg.require("split.train");
  cfg.require("split.validation");
  cfg.require("split.test");
  if (cfg.split_train + cfg.split_validation + cfg.split_test != cfg.dataset.n_sequences) {
    throw InvalidConfig("split counts must sum to dataset.sequences");
  }
  if (cfg.split_train == 0) throw TooFewSequences("split.train must be >= 1");

  fs::create_directories(out_dir);

  std::vector<Sequence> sequences = generate(cfg.dataset);
  SplitRatios ratios;
  const double n = static_cast<double>(cfg.dataset.n_sequences);
  ratios.train = static_cast<double>(cfg.split_train) / n;
  ratios.validation = static_cast<double>(cfg.split_validation) / n;
  ratios.test = static_cast<double>(cfg.split_test) / n;
  DatasetBundle bundle = normalize(split(std::move(sequences), ratios, cfg.seed));

  save_sequences(join_path(out_dir, "train.seq"), bundle.train);
  save_sequences(join_path(out_dir, "validation.seq"), bundle.validation);
  save_sequences(join_path(out_dir, "test.seq"), bundle.test);

  std::ostringstream norm;
  norm << "dims = " << bundle.normalization.means.size() << '\n';
  norm << "means =";
  for (double m : bundle.normalization.means) norm << ' ' << format_double(m);
  norm << '\n';
  norm << "scale = " << format_double(bundle.normalization.scale) << '\n';
  write_text(join_path(out_dir, "normalization.txt"), norm.str());

  std::ostringstream manifest;
  manifest << "seed = " << cfg.seed << '\n';
  manifest << "dataset.kind = " << kind_name(cfg.dataset.kind) << '\n';
  manifest << "dataset.sequences = " << cfg.dataset.n_sequences << '\n';
  manifest << "dataset.length = " << cfg.dataset.length << '\n';
  if (cfg.dataset.kind == GeneratorKind::nonlinear_cts) {
    const auto& cts = cfg.dataset.nonlinear;
    manifest << "dataset.dim = " << cts.obs_dim << '\n';
    manifest << "dataset.base_angle = " << format_double(cts.base_angle) << '\n';
    manifest << "dataset.angle_gain = " << format_double(cts.angle_gain) << '\n';
    manifest << "dataset.angle_sharpness = " << format_double(cts.angle_sharpness) << '\n';
    manifest << "dataset.radius_min = " << format_double(cts.radius_min) << '\n';
    manifest << "dataset.radius_max = " << format_double(cts.radius_max) << '\n';
    manifest << "dataset.process_noise = " << format_double(cts.process_noise) << '\n';
    manifest << "dataset.obs_noise = " << format_double(cts.obs_noise) << '\n';
  }
  manifest << "split.train = " << cfg.split_train << '\n';
  manifest << "split.validation = " << cfg.split_validation << '\n';
  manifest << "split.test = " << cfg.split_test << '\n';
  for (const char* name : {"train.seq", "validation.seq", "test.seq", "normalization.txt"}) {
    manifest << "file." << name << " = fnv1a64:" << file_hash_hex(join_path(out_dir, name))
             << '\n';
  }
  write_text(join_path(out_dir, "manifest.txt"), manifest.str());

  log << "generated " << bundle.train.size() << "/" << bundle.validation.size() << "/"
      << bundle.test.size() << " train/validation/test sequences in " << out_dir << "\n";
}

void cmd_train(const RunConfig& cfg, const std::string& out_dir,
               const std::optional<std::string>& model_path, std::ostream& log) {
  cfg.require("run.seed");
  cfg.require("model.state_dim");

  const std::vector<Sequence> train = load_split(out_dir, "train.seq", true);
  const std::vector<Sequence> validation = load_split(out_dir, "validation.seq", false);

  log << "training on " << train.size() << " sequences\n";
  TrainResult result = train_full(train, cfg.train, validation);

  const std::string model_file = model_path.value_or(join_path(out_dir, "spr_model.bin"));
  save_spr_model(model_file, result.params);

  std::ostringstream csv;
  result.report.write_csv(csv);
  write_text(join_path(out_dir, "train_report.csv"), csv.str());

  for (const auto& note : result.report.notes) log << "note: " << note << "\n";
  log << "final validation loss (per dim): "
      << format_double(result.report.final_validation_loss) << "\n";
  log << "wall clock: " << format_double(result.report.wall_clock_seconds) << " s\n";
  log << "model written to " << model_file << "\n";
}

void cmd_evaluate(const RunConfig& cfg, const std::string& out_dir,
                  const std::optional<std::string>& model_path, std::ostream& log) {
  cfg.require("run.seed");
  cfg.require("evaluate.horizons");

  const std::vector<Sequence> train = load_split(out_dir, "train.seq", true);
  const std::vector<Sequence> validation = load_split(out_dir, "validation.seq", false);
  const std::vector<Sequence> test = load_split(out_dir, "test.seq", true);
  if (test.empty()) throw TooFewSequences("cmd_evaluate: empty test split");
  const std::size_t obs_dim = test.front().obs_dim;

  std::vector<std::unique_ptr<Forecaster>> roster;
  for (const auto& model : cfg.models) {
    if (model == "spr") {
      const std::string path = model_path.value_or(join_path(out_dir, "spr_model.bin"));
      roster.push_back(std::make_unique<SprForecaster>(load_spr_model(path)));
    } else if (model == "linear") {
      for (std::size_t order : cfg.linear_orders) {
        roster.push_back(std::make_unique<LinearArForecaster>(fit_linear_ar_validated(
            train, validation, order, cfg.horizons, cfg.lambda_grid, cfg.min_prefix)));
      }
    } else if (model == "hmm") {
      Rng rng = Rng(cfg.seed).substream("evaluate/hmm");
      roster.push_back(std::make_unique<GaussianHmmForecaster>(
          hmm_em_fit(train, cfg.hmm_states, cfg.hmm_iterations, rng, cfg.hmm_restarts).model));
    } else if (model == "average") {
      roster.push_back(
          std::make_unique<AveragePredictorForecaster>(average_predictor(obs_dim)));
    }
  }

  std::vector<HorizonReport> reports;
  for (const auto& model : roster) {
    reports.push_back(evaluate(*model, test, cfg.horizons, cfg.min_prefix));
    const std::string name = sanitize_model_name(reports.back().model);
    write_text(join_path(out_dir, "report_" + name + ".csv"), reports.back().to_csv());
    log << "evaluated " << reports.back().model << "\n";
  }

  const ComparisonTable table = compare(reports);
  if (table.reduced) log << "note: comparison restricted to the common horizon grid\n";
  write_text(join_path(out_dir, "comparison.csv"), table.to_csv());
  log << "comparison written to " << join_path(out_dir, "comparison.csv") << "\n";
}

void cmd_predict(const std::string& model_path, const std::string& sequence_path,
                 std::size_t t, std::size_t k, std::size_t sequence_index,
                 std::ostream& out) {
  const std::vector<Sequence> sequences = load_sequences(sequence_path);
  if (sequence_index >= sequences.size()) {
    throw OutOfRange("sequence index " + std::to_string(sequence_index) + " outside [0, " +
                     std::to_string(sequences.size() - 1) + "]");
  }
  const Sequence& seq = sequences[sequence_index];
  if (t < 1 || t > seq.length) {
    throw OutOfRange("t = " + std::to_string(t) + " outside [1, " +
                     std::to_string(seq.length) + "]");
  }

  const std::vector<std::uint8_t> bytes = read_file(model_path);
  std::unique_ptr<Forecaster> model;
  switch (peek_model_kind(bytes)) {
    case ModelKind::spr:
      model = std::make_unique<SprForecaster>(deserialize_spr(bytes));
      break;
    case ModelKind::linear_ar:
      model = std::make_unique<LinearArForecaster>(deserialize_linear_ar(bytes));
      break;
    case ModelKind::gaussian_hmm:
      model = std::make_unique<GaussianHmmForecaster>(deserialize_gaussian_hmm(bytes));
      break;
    case ModelKind::discrete_hmm:
      throw CorruptModelFile("discrete hmm files cannot forecast real sequences");
  }

  const Vector prediction = model->predict(seq, t, k);
  for (std::size_t j = 0; j < prediction.size(); ++j) {
    if (j > 0) out << ' ';
    out << format_double(prediction[j]);
  }
  out << '\n';
}

}  // namespace sprdm
