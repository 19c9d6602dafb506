#include "kblrn/evaluator.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "kblrn/parallel.hpp"
#include "kblrn/text_io.hpp"

namespace kblrn {

std::vector<CompletionQuery> queries_for(std::span<const Triple> triples) {
    std::vector<CompletionQuery> out;
    out.reserve(2 * triples.size());
    for (const auto& t : triples) {
        out.push_back({QueryDirection::Tail, t.head, t.relation, t.tail});
        out.push_back({QueryDirection::Head, t.tail, t.relation, t.head});
    }
    return out;
}

Metrics Metrics::from_ranks(std::span<const std::size_t> ranks) {
    Metrics m;
    m.count = ranks.size();
    if (ranks.empty()) return m;
    double sum_rank = 0, sum_rr = 0;
    std::size_t h1 = 0, h3 = 0, h5 = 0, h10 = 0;
    for (auto r : ranks) {
        sum_rank += static_cast<double>(r);
        sum_rr += 1.0 / static_cast<double>(r);
        h1 += r <= 1;
        h3 += r <= 3;
        h5 += r <= 5;
        h10 += r <= 10;
    }
    const double n = static_cast<double>(ranks.size());
    m.mean_rank = sum_rank / n;
    m.mrr = 100.0 * sum_rr / n;
    m.hits1 = 100.0 * static_cast<double>(h1) / n;
    m.hits3 = 100.0 * static_cast<double>(h3) / n;
    m.hits5 = 100.0 * static_cast<double>(h5) / n;
    m.hits10 = 100.0 * static_cast<double>(h10) / n;
    return m;
}

std::string Metrics::to_table(const std::string& title) const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    if (!title.empty()) os << title << "\n";
    os << "queries  MR       MRR    Hits@1  Hits@3  Hits@5  Hits@10\n";
    os << std::left << std::setw(9) << count << std::setw(9) << mean_rank << std::setw(7) << mrr << std::setw(8)
       << hits1 << std::setw(8) << hits3 << std::setw(8) << hits5 << hits10 << "\n";
    return os.str();
}

std::string Metrics::to_key_values(const std::string& prefix) const {
    std::string out;
    auto kv = [&](const char* key, const std::string& v) { out += prefix + key + "=" + v + "\n"; };
    kv("queries", std::to_string(count));
    kv("mr", format_double(mean_rank));
    kv("mrr", format_double(mrr));
    kv("hits1", format_double(hits1));
    kv("hits3", format_double(hits3));
    kv("hits5", format_double(hits5));
    kv("hits10", format_double(hits10));
    return out;
}

Vector query_logits(const PoeModel& model, const FeatureExtractor& features, const CompletionQuery& q) {
    const auto set = q.direction == QueryDirection::Tail ? features.all_tails(q.relation, q.fixed)
                                                         : features.all_heads(q.relation, q.fixed);
    return logits(model, set);
}

std::size_t rank_in(const Vector& logits, EntityId gold, std::span<const EntityId> filtered) {
    const double g = logits[gold.index()];
    std::size_t greater = 0, equal = 0;
    for (Eigen::Index e = 0; e < logits.size(); ++e) {
        const EntityId id{static_cast<std::uint32_t>(e)};
        if (id == gold || std::binary_search(filtered.begin(), filtered.end(), id)) continue;
        if (logits[e] > g)
            ++greater;
        else if (logits[e] == g)
            ++equal;
    }
    return 1 + greater + equal / 2;
}

namespace {
std::span<const EntityId> known_completions(const TripleStore& store, const CompletionQuery& q) {
    return q.direction == QueryDirection::Tail ? store.known_tails(q.fixed, q.relation)
                                               : store.known_heads(q.fixed, q.relation);
}
}  // namespace

std::size_t rank_query(const PoeModel& model, const FeatureExtractor& features, const CompletionQuery& q) {
    return rank_in(query_logits(model, features, q), q.gold, known_completions(features.store(), q));
}

std::vector<std::size_t> rank_queries(const PoeModel& model, const FeatureExtractor& features,
                                      std::span<const CompletionQuery> queries, unsigned threads) {
    std::vector<std::size_t> ranks(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) { ranks[i] = rank_query(model, features, queries[i]); });
    return ranks;
}

Metrics evaluate(const PoeModel& model, const FeatureExtractor& features, std::span<const CompletionQuery> queries,
                 unsigned threads) {
    const auto ranks = rank_queries(model, features, queries, threads);
    return Metrics::from_ranks(ranks);
}

Metrics evaluate(const PoeModel& model, const FeatureExtractor& features, Split split, unsigned threads) {
    const auto queries = queries_for(features.store().triples(split));
    return evaluate(model, features, queries, threads);
}

double average_precision(std::span<const double> scores, std::span<const char> positive) {
    if (scores.size() != positive.size()) throw std::invalid_argument("scores and labels differ in length");
    const auto total_pos = std::count_if(positive.begin(), positive.end(), [](char p) { return p != 0; });
    if (total_pos == 0) throw DataError("PR-AUC needs at least one positive");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double ap = 0;
    std::size_t seen = 0, seen_pos = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i, block_pos = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) block_pos += positive[order[j++]] != 0;
        seen += j - i;
        seen_pos += block_pos;
        if (block_pos)
            ap += static_cast<double>(block_pos) * static_cast<double>(seen_pos) / static_cast<double>(seen);
        i = j;
    }
    return ap / static_cast<double>(total_pos);
}

double pr_auc(const PoeModel& model, const FeatureExtractor& features, const CompletionQuery& query,
              std::span<const char> positive) {
    if (positive.size() != features.store().num_entities())
        throw std::invalid_argument("ground truth must label every entity");
    const Vector s = query_logits(model, features, query);
    return average_precision(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), positive);
}

std::vector<char> parse_gold_labels(std::string_view text, const Vocabulary<EntityId>& entities,
                                    std::vector<std::string>* unknown, const std::string& source) {
    std::vector<char> labels(entities.size(), 0);
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        if (line.empty()) return;
        auto cols = split(line, '\t');
        if (cols.size() != 2 || (cols[1] != "0" && cols[1] != "1"))
            throw ParseError(source, number, "expected 'entity<TAB>1' or 'entity<TAB>0'");
        auto id = entities.find(cols[0]);
        if (!id) {
            if (unknown) unknown->emplace_back(cols[0]);
            return;
        }
        labels[id->index()] = cols[1] == "1";
    });
    return labels;
}

CardinalitySplit split_by_cardinality(const TripleStore& store, std::span<const CompletionQuery> queries) {
    CardinalitySplit out;
    for (const auto& q : queries) {
        if (known_completions(store, q).size() == 1)
            out.one.push_back(q);
        else
            out.many.push_back(q);
    }
    return out;
}

std::vector<Prediction> predict(const PoeModel& model, const FeatureExtractor& features, QueryDirection direction,
                                EntityId fixed, RelationId relation, std::size_t topk, bool filtered) {
    const CompletionQuery q{direction, fixed, relation, EntityId{}};
    const Vector s = query_logits(model, features, q);
    const auto known = known_completions(features.store(), q);
    std::vector<Prediction> all;
    for (Eigen::Index e = 0; e < s.size(); ++e) {
        const EntityId id{static_cast<std::uint32_t>(e)};
        if (filtered && std::binary_search(known.begin(), known.end(), id)) continue;
        all.push_back({id, s[e]});
    }
    const std::size_t k = std::min(topk, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      [](const Prediction& a, const Prediction& b) {
                          return a.logit != b.logit ? a.logit > b.logit : a.entity < b.entity;
                      });
    all.resize(k);
    return all;
}

}  // namespace kblrn
