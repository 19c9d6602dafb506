#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "kblrn/config.hpp"
#include "kblrn/optimizer.hpp"
#include "kblrn/poe_model.hpp"
#include "kblrn/relational_features.hpp"

namespace kblrn {

class CorruptionError : public DataError {
    using DataError::DataError;
};
class SchemaError : public DataError {
    using DataError::DataError;
};
class UnsupportedVersionError : public DataError {
    using DataError::DataError;
};

struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    Vocabulary<EntityId> entities;
    Vocabulary<RelationId> relations;
    Vocabulary<FeatureId> features;
    TrainConfig config;
    RuleSet rules;
    PoeModel model;  // model.numeric carries the fitted RBF spec
    std::optional<AdamState> adam;
};

// Single-file container; layout documented in docs/checkpoint_format.md.
// With `f32`, tensors are stored as IEEE single precision.
std::string serialize_checkpoint(const Checkpoint& checkpoint, bool f32 = false);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path, bool f32 = false);

// `expected_dim`, when set, must match the stored embedding size; otherwise a
// SchemaError names the first mismatched tensor.
Checkpoint deserialize_checkpoint(std::string_view bytes, std::optional<int> expected_dim = std::nullopt);
Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<int> expected_dim = std::nullopt);

}  // namespace kblrn
