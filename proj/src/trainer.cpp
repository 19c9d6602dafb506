#include "kblrn/trainer.hpp"

#include <cmath>
#include <numeric>

#include "kblrn/evaluator.hpp"
#include "kblrn/text_io.hpp"

namespace kblrn {

NegativeSets sample_negatives(std::size_t num_entities, const Triple& positive, std::size_t n, std::mt19937_64& rng) {
    if (num_entities == 0) throw DataError("cannot sample negatives from an empty entity vocabulary");
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(num_entities - 1));
    NegativeSets out;
    out.tail_set.reserve(n + 1);
    out.head_set.reserve(n + 1);
    out.tail_set.push_back(positive);
    for (std::size_t i = 0; i < n; ++i) out.tail_set.push_back({positive.head, positive.relation, EntityId(pick(rng))});
    out.head_set.push_back(positive);
    for (std::size_t i = 0; i < n; ++i) out.head_set.push_back({EntityId(pick(rng)), positive.relation, positive.tail});
    return out;
}

bool EarlyStopping::observe(double score) {
    last_improved_ = !best_ || score > *best_;
    if (last_improved_) {
        best_ = score;
        return false;
    }
    return score < *best_;
}

std::string TrainLog::to_text() const {
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
}

std::pair<CandidateSet, CandidateSet> build_candidate_sets(const FeatureExtractor& features, const NegativeSets& sets) {
    const Triple& pos = sets.tail_set.front();
    std::vector<EntityId> tails, heads;
    tails.reserve(sets.tail_set.size());
    heads.reserve(sets.head_set.size());
    for (const auto& t : sets.tail_set) tails.push_back(t.tail);
    for (const auto& t : sets.head_set) heads.push_back(t.head);
    return {features.tail_candidates(pos.relation, pos.head, tails, 0),
            features.head_candidates(pos.relation, pos.tail, heads, 0)};
}

struct Trainer {
    static void log_loss(TrainLog& log, std::size_t epoch, double loss) {
        log.losses.push_back({epoch, loss});
        log.lines_.push_back(std::to_string(epoch) + "\t" + format_double(loss));
    }
    static void log_validation(TrainLog& log, std::size_t epoch, double mrr) {
        log.validations.push_back({epoch, mrr});
        log.lines_.push_back("validation\t" + std::to_string(epoch) + "\t" + format_double(mrr));
    }
};

TrainResult train_from(const FeatureExtractor& features, const TrainConfig& config, PoeModel model, AdamState adam,
                       unsigned threads, const ProgressFn& progress) {
    config.validate();
    const TripleStore& store = features.store();
    const auto train_triples = store.train();
    const auto valid_queries = queries_for(store.triples(Split::Valid));

    TrainResult result;
    result.model = model;
    result.adam = adam;
    if (config.epochs == 0 || train_triples.empty()) return result;

    std::mt19937_64 rng(config.seed ^ 0x5eedf00dULL);
    std::vector<std::size_t> order(train_triples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Gradients grads(model.params);
    EarlyStopping stopping;
    bool have_best = false;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i);
            std::swap(order[i], order[pick(rng)]);
        }

        double epoch_loss = 0;
        std::vector<CandidateSet> batch;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            batch.clear();
            for (std::size_t i = start; i < end; ++i) {
                const auto sets = sample_negatives(store.num_entities(), train_triples[order[i]],
                                                   config.num_negatives, rng);
                auto [tail_set, head_set] = build_candidate_sets(features, sets);
                batch.push_back(std::move(tail_set));
                batch.push_back(std::move(head_set));
            }
            const double loss = loss_and_gradients(model, batch, grads);
            if (!std::isfinite(loss)) throw NonFiniteError("non-finite training loss in epoch " + std::to_string(epoch));
            adam_step(model.params, grads, adam, config.learning_rate);
            grads.clear();
            epoch_loss += loss;
        }
        epoch_loss /= static_cast<double>(2 * order.size());
        Trainer::log_loss(result.log, epoch, epoch_loss);
        if (progress) progress("epoch " + std::to_string(epoch) + " loss " + format_double(epoch_loss));

        const bool due = epoch % config.validate_every == 0 || epoch == config.epochs;
        if (!due || valid_queries.empty()) continue;
        const double mrr = evaluate(model, features, valid_queries, threads).mrr;
        Trainer::log_validation(result.log, epoch, mrr);
        if (progress) progress("validation epoch " + std::to_string(epoch) + " MRR " + format_double(mrr));
        const bool stop = stopping.observe(mrr);
        if (stopping.last_improved()) {
            result.model = model;
            result.adam = adam;
            result.best_mrr = mrr;
            result.best_epoch = epoch;
            have_best = true;
        }
        if (stop) {
            result.stopped_early = true;
            break;
        }
    }
    if (!have_best) {
        result.model = std::move(model);
        result.adam = std::move(adam);
        result.best_epoch = result.log.losses.empty() ? 0 : result.log.losses.back().epoch;
    }
    return result;
}

TrainResult train(const FeatureExtractor& features, const TrainConfig& config, unsigned threads,
                  const ProgressFn& progress) {
    ModelOptions options{config.embedding_dim, config.ablation, config.numeric_transform};
    PoeModel model = init_model(features.store(), features.rules(), features.numeric_spec(), options, config.seed);
    AdamState adam = AdamState::zeros_like(model.params);
    return train_from(features, config, std::move(model), std::move(adam), threads, progress);
}

}  // namespace kblrn
