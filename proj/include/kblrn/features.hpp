#pragma once

#include <span>
#include <vector>

#include "kblrn/kb_store.hpp"
#include "kblrn/numerical_features.hpp"
#include "kblrn/relational_features.hpp"

namespace kblrn {

// A set of candidate triples sharing one relation, with their precomputed
// relational and numerical inputs stored column-wise.
struct CandidateSet {
    RelationId relation;
    std::vector<EntityId> heads;
    std::vector<EntityId> tails;
    // Active relational formulas of candidate c: active[offsets[c] .. offsets[c+1]).
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> active;
    Matrix numeric_diff;                                        // d_n x C
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> present;  // d_n x C
    // Index of the observed triple (the cross-entropy target).
    std::size_t positive = 0;

    std::size_t size() const { return heads.size(); }
    Triple triple(std::size_t c) const { return Triple{heads[c], relation, tails[c]}; }
    std::span<const std::uint32_t> active_of(std::size_t c) const {
        return std::span<const std::uint32_t>(active.data() + offsets[c], offsets[c + 1] - offsets[c]);
    }
};

class FeatureExtractor {
   public:
    FeatureExtractor(const TripleStore& store, const RuleSet& rules, const NumericTable& table,
                     const RelationNumericSpec& spec);

    const TripleStore& store() const { return store_; }
    const RuleSet& rules() const { return rules_; }
    const RelationNumericSpec& numeric_spec() const { return spec_; }

    // Single pair, evaluating every formula directly.
    CandidateSet pair(RelationId r, EntityId h, EntityId t) const;

    // Candidates (h, r, t_c); formulas are expanded once from h.
    CandidateSet tail_candidates(RelationId r, EntityId h, std::span<const EntityId> tails,
                                 std::size_t positive = 0) const;
    // Candidates (h_c, r, t); formulas are expanded once from t.
    CandidateSet head_candidates(RelationId r, EntityId t, std::span<const EntityId> heads,
                                 std::size_t positive = 0) const;

    // Every entity of the vocabulary as candidate, in id order.
    CandidateSet all_tails(RelationId r, EntityId h) const;
    CandidateSet all_heads(RelationId r, EntityId t) const;

   private:
    CandidateSet expand(RelationId r, EntityId anchor, bool anchor_is_head, std::span<const EntityId> others,
                        std::size_t positive) const;
    void fill_numeric(CandidateSet& set) const;

    const TripleStore& store_;
    const RuleSet& rules_;
    const NumericTable& table_;
    const RelationNumericSpec& spec_;
};

}  // namespace kblrn
