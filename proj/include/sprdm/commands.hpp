#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "sprdm/config.hpp"

namespace sprdm {

// The CLI subcommands as library functions so pipelines can be driven (and
// tested) without spawning a process. All of them throw on failure; the CLI
// maps exception types onto exit codes.

// Override the config seed (the --seed flag).
void apply_seed_override(RunConfig& cfg, std::uint64_t seed);

// Generate, split and normalize the configured dataset; writes train.seq,
// validation.seq, test.seq, normalization.txt and manifest.txt into out_dir.
void cmd_generate(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

// Train on out_dir/train.seq (validation.seq feeds the report when present);
// writes the model and train_report.csv.
void cmd_train(const RunConfig& cfg, const std::string& out_dir,
               const std::optional<std::string>& model_path, std::ostream& log);

// Evaluate the configured model roster on out_dir/test.seq; baselines are fit
// on the training split with penalties selected on validation. Writes one
// report CSV per model plus comparison.csv.
void cmd_evaluate(const RunConfig& cfg, const std::string& out_dir,
                  const std::optional<std::string>& model_path, std::ostream& log);

// Predict x_{t+k} from the first (or chosen) sequence of a sequence file with
// any saved model; prints the vector with 17 significant digits. The input
// sequence must already live in the model's (normalized) data space.
void cmd_predict(const std::string& model_path, const std::string& sequence_path,
                 std::size_t t, std::size_t k, std::size_t sequence_index, std::ostream& out);

// FNV-1a 64 content hash as fixed-width hex, used by the dataset manifest.
std::string file_hash_hex(const std::string& path);

}  // namespace sprdm
