#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sprdm/baselines.hpp"
#include "sprdm/model.hpp"

namespace sprdm {

// Binary model files: 8-byte ASCII magic, u32 version, u64 dimensions, then
// the parameter matrices as little-endian IEEE-754 doubles in declared
// order. Round trips are exact at the bit level.

enum class ModelKind { spr, linear_ar, gaussian_hmm, discrete_hmm };

std::vector<std::uint8_t> serialize(const SprParams& params);
std::vector<std::uint8_t> serialize(const LinearArModel& model);
std::vector<std::uint8_t> serialize(const GaussianHmm& model);
std::vector<std::uint8_t> serialize(const DiscreteHmm& model);

SprParams deserialize_spr(const std::vector<std::uint8_t>& bytes);
LinearArModel deserialize_linear_ar(const std::vector<std::uint8_t>& bytes);
GaussianHmm deserialize_gaussian_hmm(const std::vector<std::uint8_t>& bytes);
DiscreteHmm deserialize_discrete_hmm(const std::vector<std::uint8_t>& bytes);

// Kind of the model stored in `bytes`; throws CorruptModelFile on an unknown
// or short header.
ModelKind peek_model_kind(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

void save_spr_model(const std::string& path, const SprParams& params);
SprParams load_spr_model(const std::string& path);
void save_linear_ar(const std::string& path, const LinearArModel& model);
LinearArModel load_linear_ar(const std::string& path);
void save_gaussian_hmm(const std::string& path, const GaussianHmm& model);
GaussianHmm load_gaussian_hmm(const std::string& path);
void save_discrete_hmm(const std::string& path, const DiscreteHmm& model);
DiscreteHmm load_discrete_hmm(const std::string& path);

}  // namespace sprdm
