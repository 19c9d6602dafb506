#pragma once

#include <span>
#include <string>
#include <vector>

#include "kblrn/features.hpp"
#include "kblrn/poe_model.hpp"

namespace kblrn {

enum class QueryDirection { Tail, Head };  // (h, r, ?) and (?, r, t)

struct CompletionQuery {
    QueryDirection direction = QueryDirection::Tail;
    EntityId fixed;
    RelationId relation;
    EntityId gold;

    Triple triple() const {
        return direction == QueryDirection::Tail ? Triple{fixed, relation, gold} : Triple{gold, relation, fixed};
    }
};

// Both directions for every triple, tail query first.
std::vector<CompletionQuery> queries_for(std::span<const Triple> triples);

struct Metrics {
    double mean_rank = 0;
    double mrr = 0;  // x100
    double hits1 = 0, hits3 = 0, hits5 = 0, hits10 = 0;  // x100
    std::size_t count = 0;

    static Metrics from_ranks(std::span<const std::size_t> ranks);
    std::string to_table(const std::string& title = "") const;
    std::string to_key_values(const std::string& prefix = "") const;
    bool operator==(const Metrics&) const = default;
};

// Candidate logits for a query, one per entity in id order.
Vector query_logits(const PoeModel& model, const FeatureExtractor& features, const CompletionQuery& q);

// Mid-tie rank of `gold` among `logits`, ignoring the entities in
// `filtered` (sorted ascending; the gold is never ignored).
std::size_t rank_in(const Vector& logits, EntityId gold, std::span<const EntityId> filtered);

// Filtered rank of the gold completion against every entity.
std::size_t rank_query(const PoeModel& model, const FeatureExtractor& features, const CompletionQuery& q);

std::vector<std::size_t> rank_queries(const PoeModel& model, const FeatureExtractor& features,
                                      std::span<const CompletionQuery> queries, unsigned threads = 1);

Metrics evaluate(const PoeModel& model, const FeatureExtractor& features, std::span<const CompletionQuery> queries,
                 unsigned threads = 1);
Metrics evaluate(const PoeModel& model, const FeatureExtractor& features, Split split, unsigned threads = 1);

// Step-wise area under the precision-recall curve. Items are visited by
// descending score; a block of tied scores counts as a single threshold.
double average_precision(std::span<const double> scores, std::span<const char> positive);

// PR-AUC of a query's candidate ranking against a complete ground truth
// (`positive[e]` for every entity e). No filtering.
double pr_auc(const PoeModel& model, const FeatureExtractor& features, const CompletionQuery& query,
              std::span<const char> positive);

// Parses `entity<TAB>{1|0}` lines. Unknown entity labels are collected into
// `unknown` and skipped.
std::vector<char> parse_gold_labels(std::string_view text, const Vocabulary<EntityId>& entities,
                                    std::vector<std::string>* unknown = nullptr, const std::string& source = "<gold>");

struct CardinalitySplit {
    std::vector<CompletionQuery> one;
    std::vector<CompletionQuery> many;
};

// One: exactly one entity completes the query across all splits.
CardinalitySplit split_by_cardinality(const TripleStore& store, std::span<const CompletionQuery> queries);

struct Prediction {
    EntityId entity;
    double logit = 0;
};

// Top-k completions by logit (descending, ties by entity id). With
// `filtered`, entities already known to complete the query are dropped.
std::vector<Prediction> predict(const PoeModel& model, const FeatureExtractor& features, QueryDirection direction,
                                EntityId fixed, RelationId relation, std::size_t topk, bool filtered = false);

}  // namespace kblrn
