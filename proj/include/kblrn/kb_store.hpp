#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "kblrn/types.hpp"

namespace kblrn {

enum class Split { Train = 0, Valid = 1, Test = 2 };
inline constexpr std::array<Split, 3> kAllSplits{Split::Train, Split::Valid, Split::Test};
const char* split_name(Split split);

// Compressed adjacency: for every key entity, its (relation, neighbour) pairs
// sorted by relation then neighbour.
class AdjacencyIndex {
   public:
    AdjacencyIndex() = default;
    // Each element is (key, relation, neighbour); duplicates must already be removed.
    AdjacencyIndex(std::size_t num_entities, std::vector<Triple> keyed);

    std::span<const EntityId> neighbors(EntityId key, RelationId relation) const;
    std::span<const RelationId> edge_relations(EntityId key) const;
    std::span<const EntityId> edge_entities(EntityId key) const;
    std::size_t degree(EntityId key) const;

   private:
    std::vector<std::size_t> offsets_;
    std::vector<RelationId> relations_;
    std::vector<EntityId> entities_;
};

struct LoadReport {
    std::size_t entities = 0;
    std::size_t relations = 0;
    std::array<std::size_t, 3> triples{};     // per split, after dedup
    std::array<std::size_t, 3> duplicates{};  // dropped duplicate lines per split
    // Entities that never occur in the training split.
    std::vector<std::string> unseen_in_train;

    std::string to_string() const;
};

class TripleStore {
   public:
    TripleStore() = default;
    // Deduplicates each split. Ids in `splits` must be valid for the vocabularies.
    TripleStore(Vocabulary<EntityId> entities, Vocabulary<RelationId> relations,
                std::array<std::vector<Triple>, 3> splits, LoadReport* report = nullptr);

    // One TSV file per split (train, valid, test). Empty paths are treated as empty splits.
    static TripleStore load(const std::filesystem::path& train, const std::filesystem::path& valid,
                            const std::filesystem::path& test, LoadReport* report = nullptr);

    const Vocabulary<EntityId>& entities() const { return entities_; }
    const Vocabulary<RelationId>& relations() const { return relations_; }
    std::size_t num_entities() const { return entities_.size(); }
    std::size_t num_relations() const { return relations_.size(); }

    std::span<const Triple> triples(Split split) const { return splits_[static_cast<int>(split)]; }
    std::span<const Triple> train() const { return triples(Split::Train); }

    // Known-true in any split.
    bool exists(EntityId h, RelationId r, EntityId t) const { return known_.contains(Triple{h, r, t}); }
    bool exists(const Triple& t) const { return known_.contains(t); }

    // Training-split adjacency, used by rule mining and feature extraction.
    std::span<const EntityId> neighbors_out(EntityId h, RelationId r) const { return train_out_.neighbors(h, r); }
    std::span<const EntityId> neighbors_in(EntityId t, RelationId r) const { return train_in_.neighbors(t, r); }
    const AdjacencyIndex& train_out() const { return train_out_; }
    const AdjacencyIndex& train_in() const { return train_in_; }
    bool train_has(EntityId h, RelationId r, EntityId t) const;

    // All-split adjacency, used for filtered ranking and query cardinality.
    std::span<const EntityId> known_tails(EntityId h, RelationId r) const { return known_out_.neighbors(h, r); }
    std::span<const EntityId> known_heads(EntityId t, RelationId r) const { return known_in_.neighbors(t, r); }

    // Training triples of relation r, sorted by (head, tail).
    std::span<const Triple> train_of(RelationId r) const;

    std::string vocabulary_dump_entities() const;
    std::string vocabulary_dump_relations() const;

   private:
    void check_ids(const Triple& t) const;

    Vocabulary<EntityId> entities_;
    Vocabulary<RelationId> relations_;
    std::array<std::vector<Triple>, 3> splits_;
    std::unordered_set<Triple, TripleHash> known_;
    AdjacencyIndex train_out_, train_in_, known_out_, known_in_;
    std::vector<Triple> train_by_relation_;
    std::vector<std::size_t> relation_offsets_;
};

}  // namespace kblrn
