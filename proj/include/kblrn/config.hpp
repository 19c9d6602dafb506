#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "kblrn/poe_model.hpp"

namespace kblrn {

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 512;
    std::size_t num_negatives = 500;
    std::size_t epochs = 100;
    std::size_t validate_every = 5;
    int embedding_dim = 100;
    Experts ablation;
    NumericTransform numeric_transform = NumericTransform::Rbf;
    std::uint64_t seed = 0;
    bool deterministic = false;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct FeatureConfig {
    double min_head_coverage = 0.01;
    std::size_t min_head_support = 1;
    double tau = 0.9;
    double sigma_floor = 1e-6;

    void validate() const;
    bool operator==(const FeatureConfig&) const = default;
};

struct PipelineConfig {
    TrainConfig train;
    FeatureConfig features;
    unsigned threads = 0;  // 0: hardware parallelism
};

using KeyValues = std::map<std::string, std::string>;

// Flat `key=value` lines; '#' starts a comment line. Throws ParseError.
KeyValues parse_key_values(std::string_view text, const std::string& source = "<config>");

// Applies known keys; throws std::invalid_argument naming an unknown key or bad value.
void apply(PipelineConfig& config, const KeyValues& values);
void apply(TrainConfig& config, const KeyValues& values);

std::string format(const TrainConfig& config);
std::string format(const FeatureConfig& config);
std::string format(const PipelineConfig& config);

}  // namespace kblrn
