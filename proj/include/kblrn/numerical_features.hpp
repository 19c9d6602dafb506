#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kblrn/kb_store.hpp"

namespace kblrn {

struct NumericLoadReport {
    std::size_t rows = 0;
    std::size_t stored = 0;
    std::size_t duplicates = 0;
    // Entity labels that are not in the KB vocabulary (skipped).
    std::vector<std::string> unknown_entities;
};

// Entity x feature value table. Missing values are NaN.
class NumericTable {
   public:
    NumericTable() = default;
    NumericTable(std::size_t num_entities, Vocabulary<FeatureId> features, Matrix values);

    static NumericTable load(const std::filesystem::path& path, const Vocabulary<EntityId>& entities,
                             NumericLoadReport* report = nullptr);
    static NumericTable parse(std::string_view text, const Vocabulary<EntityId>& entities,
                              NumericLoadReport* report = nullptr, const std::string& source = "<numeric>");

    const Vocabulary<FeatureId>& features() const { return features_; }
    std::size_t num_features() const { return features_.size(); }
    std::size_t num_entities() const { return static_cast<std::size_t>(values_.rows()); }

    bool has(EntityId e, FeatureId f) const;
    double value(EntityId e, FeatureId f) const { return values_(e.index(), f.index()); }
    // Entities with at least one value.
    std::size_t covered_entities() const;

   private:
    Vocabulary<FeatureId> features_;
    Matrix values_;  // rows: entities, cols: features
};

inline constexpr double kDefaultSigmaFloor = 1e-6;

// Fixed RBF parameters of one selected feature of a relation.
struct RbfFeature {
    FeatureId feature;
    double center = 0;
    double width = 1;
    std::size_t support = 0;

    bool operator==(const RbfFeature&) const = default;
};

// Per relation: the selected features (d_n entries) with their RBF centres and widths.
class RelationNumericSpec {
   public:
    RelationNumericSpec() = default;
    explicit RelationNumericSpec(std::size_t num_relations) : features_(num_relations) {}

    std::size_t num_relations() const { return features_.size(); }
    const std::vector<RbfFeature>& features(RelationId r) const { return features_.at(r.index()); }
    std::vector<RbfFeature>& features(RelationId r) { return features_.at(r.index()); }
    std::size_t size(RelationId r) const { return features_.at(r.index()).size(); }
    std::size_t relations_with_features() const;

    bool operator==(const RelationNumericSpec&) const = default;

   private:
    std::vector<std::vector<RbfFeature>> features_;
};

struct FeatureSupport {
    FeatureId feature;
    std::size_t support = 0;
};

// Features whose values are present on both sides for at least `tau` of r's
// training triples; descending support, ties by feature id.
std::vector<FeatureSupport> select_features(const TripleStore& store, const NumericTable& table, RelationId r,
                                            double tau);

// Mean and population standard deviation of h - t over r's training triples
// with both values present. Throws DataError when there are none.
RbfFeature fit_rbf(const TripleStore& store, const NumericTable& table, RelationId r, FeatureId feature,
                   double sigma_floor = kDefaultSigmaFloor);

struct NumericSpecOptions {
    double tau = 0.9;
    double sigma_floor = kDefaultSigmaFloor;
    unsigned threads = 1;
};

RelationNumericSpec build_numeric_spec(const TripleStore& store, const NumericTable& table,
                                       const NumericSpecOptions& options = {});

struct NumericDiff {
    Vector values;                                // h - t; undefined where absent
    Eigen::Array<bool, Eigen::Dynamic, 1> present;
};

NumericDiff numeric_diff_vector(const NumericTable& table, const RelationNumericSpec& spec, RelationId r, EntityId h,
                                EntityId t);

// `relation<TAB>feature<TAB>c<TAB>sigma<TAB>support`
std::string format_numeric_spec(const RelationNumericSpec& spec, const Vocabulary<RelationId>& relations,
                                const Vocabulary<FeatureId>& features);
RelationNumericSpec parse_numeric_spec(std::string_view text, const Vocabulary<RelationId>& relations,
                                       const Vocabulary<FeatureId>& features,
                                       const std::string& source = "<numeric_spec>");

}  // namespace kblrn
