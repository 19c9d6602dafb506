#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kblrn/kb_store.hpp"

namespace kblrn {

enum class Direction : std::uint8_t { Forward = 0, Inverse = 1 };

// One hop of a path. Forward reads (from, relation, to); Inverse reads (to, relation, from).
struct PathStep {
    RelationId relation;
    Direction direction = Direction::Forward;

    constexpr auto operator<=>(const PathStep&) const = default;
};

// Body of a horn rule with the head variables bound to (h, t):
//   OneHop:  step0 connects h and t
//   TwoHop:  exists x with step0 connecting h to x and step1 connecting x to t
// Ordering is lexicographic over the step sequence, a shorter prefix first.
class PathFormula {
   public:
    static PathFormula one_hop(PathStep s) { return PathFormula(s); }
    static PathFormula two_hop(PathStep first, PathStep second) { return PathFormula(first, second); }

    std::size_t length() const { return length_; }
    bool is_two_hop() const { return length_ == 2; }
    const PathStep& step(std::size_t i) const { return steps_.at(i); }

    bool operator==(const PathFormula& o) const;
    bool operator<(const PathFormula& o) const;

   private:
    explicit PathFormula(PathStep s) : steps_{s, PathStep{}}, length_(1) {}
    PathFormula(PathStep a, PathStep b) : steps_{a, b}, length_(2) {}

    std::array<PathStep, 2> steps_;
    std::uint8_t length_;
};

struct MinedRule {
    PathFormula body;
    // Mining statistics; absent for externally curated rules.
    std::optional<double> coverage;
    std::size_t support = 0;
    std::size_t head_count = 0;

    bool operator==(const MinedRule&) const = default;
};

// Per-relation ordered feature list defining r_(h,t).
class RuleSet {
   public:
    RuleSet() = default;
    explicit RuleSet(std::size_t num_relations) : rules_(num_relations) {}

    std::size_t num_relations() const { return rules_.size(); }
    const std::vector<MinedRule>& rules(RelationId r) const { return rules_.at(r.index()); }
    std::vector<MinedRule>& rules(RelationId r) { return rules_.at(r.index()); }
    std::size_t size(RelationId r) const { return rules_.at(r.index()).size(); }
    std::size_t total() const;

    bool operator==(const RuleSet&) const = default;

   private:
    std::vector<std::vector<MinedRule>> rules_;
};

struct MiningOptions {
    double min_head_coverage = 0.01;
    std::size_t min_head_support = 1;
    unsigned threads = 1;
};

// Exact head-coverage mining of OneHop/TwoHop bodies over the training split.
// The trivial body (r, Forward) is never emitted for r.
RuleSet mine_rules(const TripleStore& store, const MiningOptions& options = {});

// True iff `body` holds between h and t in the training split. The edge
// (h, r, t) never satisfies the OneHop body (r, Forward) for head relation r.
bool formula_holds(const TripleStore& store, RelationId r, const PathFormula& body, EntityId h, EntityId t);

// Binary feature vector r_(h,t) for relation r (length rules.size(r)).
Vector relational_vector(const TripleStore& store, const RuleSet& rules, RelationId r, EntityId h, EntityId t);

// Indices of the formulas of r that hold between h and t, ascending.
std::vector<std::uint32_t> active_formulas(const TripleStore& store, const RuleSet& rules, RelationId r, EntityId h,
                                           EntityId t);

// Sorted, deduplicated set of entities reachable through `body` starting from
// `anchor` on the head side (anchor_is_head) or on the tail side.
std::vector<EntityId> reachable(const TripleStore& store, RelationId r, const PathFormula& body, EntityId anchor,
                                bool anchor_is_head);

// Rule file: `head_relation<TAB>body[<TAB>coverage[<TAB>support<TAB>head_count]]`,
// body `r1[+|-]` or `r1[+|-],r2[+|-]`.
std::string format_rules(const RuleSet& rules, const Vocabulary<RelationId>& relations);
RuleSet parse_rules(std::string_view text, const Vocabulary<RelationId>& relations,
                    const std::string& source = "<rules>");
void save_rules(const RuleSet& rules, const Vocabulary<RelationId>& relations, const std::filesystem::path& path);
RuleSet load_rules(const std::filesystem::path& path, const Vocabulary<RelationId>& relations);

std::string format_body(const PathFormula& body, const Vocabulary<RelationId>& relations);

}  // namespace kblrn
