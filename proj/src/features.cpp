#include "kblrn/features.hpp"

#include <algorithm>
#include <numeric>

namespace kblrn {

FeatureExtractor::FeatureExtractor(const TripleStore& store, const RuleSet& rules, const NumericTable& table,
                                   const RelationNumericSpec& spec)
    : store_(store), rules_(rules), table_(table), spec_(spec) {
    if (rules_.num_relations() != store_.num_relations() || spec_.num_relations() != store_.num_relations())
        throw DataError("rule set / numeric spec do not match the store's relation vocabulary");
}

void FeatureExtractor::fill_numeric(CandidateSet& set) const {
    const auto& features = spec_.features(set.relation);
    const auto d = static_cast<Eigen::Index>(features.size());
    const auto n = static_cast<Eigen::Index>(set.size());
    set.numeric_diff = Matrix::Zero(d, n);
    set.present = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(d, n, false);
    for (Eigen::Index i = 0; i < d; ++i) {
        const FeatureId f = features[static_cast<std::size_t>(i)].feature;
        for (Eigen::Index c = 0; c < n; ++c) {
            const EntityId h = set.heads[static_cast<std::size_t>(c)];
            const EntityId t = set.tails[static_cast<std::size_t>(c)];
            if (table_.has(h, f) && table_.has(t, f)) {
                set.numeric_diff(i, c) = table_.value(h, f) - table_.value(t, f);
                set.present(i, c) = true;
            }
        }
    }
}

CandidateSet FeatureExtractor::pair(RelationId r, EntityId h, EntityId t) const {
    CandidateSet set;
    set.relation = r;
    set.heads = {h};
    set.tails = {t};
    set.active = active_formulas(store_, rules_, r, h, t);
    set.offsets = {0, static_cast<std::uint32_t>(set.active.size())};
    fill_numeric(set);
    return set;
}

CandidateSet FeatureExtractor::expand(RelationId r, EntityId anchor, bool anchor_is_head,
                                      std::span<const EntityId> others, std::size_t positive) const {
    if (!store_.entities().contains(anchor)) throw std::out_of_range("entity id outside the vocabulary");
    CandidateSet set;
    set.relation = r;
    set.positive = positive;
    set.heads.reserve(others.size());
    set.tails.reserve(others.size());
    for (EntityId o : others) {
        if (!store_.entities().contains(o)) throw std::out_of_range("entity id outside the vocabulary");
        set.heads.push_back(anchor_is_head ? anchor : o);
        set.tails.push_back(anchor_is_head ? o : anchor);
    }

    // (entity, formula index) for every entity reachable from the anchor.
    std::vector<std::pair<EntityId, std::uint32_t>> hits;
    const auto& list = rules_.rules(r);
    for (std::size_t i = 0; i < list.size(); ++i)
        for (EntityId e : reachable(store_, r, list[i].body, anchor, anchor_is_head))
            hits.emplace_back(e, static_cast<std::uint32_t>(i));
    std::sort(hits.begin(), hits.end());

    set.offsets.reserve(others.size() + 1);
    for (EntityId o : others) {
        auto lo = std::lower_bound(hits.begin(), hits.end(), std::pair<EntityId, std::uint32_t>{o, 0});
        for (; lo != hits.end() && lo->first == o; ++lo) set.active.push_back(lo->second);
        set.offsets.push_back(static_cast<std::uint32_t>(set.active.size()));
    }
    fill_numeric(set);
    return set;
}

CandidateSet FeatureExtractor::tail_candidates(RelationId r, EntityId h, std::span<const EntityId> tails,
                                               std::size_t positive) const {
    return expand(r, h, true, tails, positive);
}

CandidateSet FeatureExtractor::head_candidates(RelationId r, EntityId t, std::span<const EntityId> heads,
                                               std::size_t positive) const {
    return expand(r, t, false, heads, positive);
}

namespace {
std::vector<EntityId> all_entities(std::size_t n) {
    std::vector<EntityId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = EntityId(static_cast<std::uint32_t>(i));
    return ids;
}
}  // namespace

CandidateSet FeatureExtractor::all_tails(RelationId r, EntityId h) const {
    const auto ids = all_entities(store_.num_entities());
    return expand(r, h, true, ids, 0);
}

CandidateSet FeatureExtractor::all_heads(RelationId r, EntityId t) const {
    const auto ids = all_entities(store_.num_entities());
    return expand(r, t, false, ids, 0);
}

}  // namespace kblrn
