#include "kblrn/poe_model.hpp"

#include <random>

namespace kblrn {

std::string to_string(NumericTransform t) { return t == NumericTransform::Rbf ? "rbf" : "sign"; }

NumericTransform parse_numeric_transform(std::string_view s) {
    if (s == "rbf") return NumericTransform::Rbf;
    if (s == "sign") return NumericTransform::Sign;
    throw std::invalid_argument("numeric transform must be 'rbf' or 'sign', got '" + std::string(s) + "'");
}

std::string Experts::name() const {
    std::string s;
    if (latent) s += 'l';
    if (relational) s += 'r';
    if (numerical) s += 'n';
    return s;
}

Experts Experts::parse(std::string_view s) {
    Experts e{false, false, false};
    for (char c : s) {
        bool* slot = c == 'l' ? &e.latent : c == 'r' ? &e.relational : c == 'n' ? &e.numerical : nullptr;
        if (!slot || *slot) throw std::invalid_argument("ablation must be a subset of 'lrn', got '" + std::string(s) + "'");
        *slot = true;
    }
    if (s.empty()) throw std::invalid_argument("ablation must name at least one expert");
    return e;
}

PoeModel init_model(std::size_t num_entities, const RuleSet& rules, const RelationNumericSpec& numeric,
                    const ModelOptions& options, std::uint64_t seed) {
    if (options.dim <= 0) throw std::invalid_argument("embedding dimension must be positive");
    if (rules.num_relations() != numeric.num_relations())
        throw DataError("rule set and numeric spec disagree on the number of relations");
    const std::size_t k = static_cast<std::size_t>(options.dim);
    const std::size_t nr = rules.num_relations();
    std::mt19937_64 rng(seed);
    auto fill = [&rng](auto&& block, double bound) {
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Eigen::Index j = 0; j < block.cols(); ++j)
            for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = u(rng);
    };

    PoeModel model;
    model.options = options;
    model.numeric = numeric;
    auto& p = model.params;
    p.entity.resize(options.dim, static_cast<Eigen::Index>(num_entities));
    fill(p.entity, glorot_bound(num_entities, k));
    p.relation.resize(options.dim, static_cast<Eigen::Index>(nr));
    p.relational.resize(nr);
    p.numerical.resize(nr);
    for (std::size_t r = 0; r < nr; ++r) {
        const RelationId rid{static_cast<std::uint32_t>(r)};
        fill(p.relation.col(static_cast<Eigen::Index>(r)), glorot_bound(k, 1));
        p.relational[r].resize(static_cast<Eigen::Index>(rules.size(rid)));
        fill(p.relational[r], glorot_bound(rules.size(rid), 1));
        p.numerical[r].resize(static_cast<Eigen::Index>(numeric.size(rid)));
        fill(p.numerical[r], glorot_bound(numeric.size(rid), 1));
    }
    return model;
}

PoeModel init_model(const TripleStore& store, const RuleSet& rules, const RelationNumericSpec& numeric,
                    const ModelOptions& options, std::uint64_t seed) {
    if (rules.num_relations() != store.num_relations())
        throw DataError("rule set does not match the store's relation vocabulary");
    return init_model(store.num_entities(), rules, numeric, options, seed);
}

double numeric_activation(const PoeModel& model, RelationId r, std::size_t i, double diff) {
    if (model.options.transform == NumericTransform::Sign) return sign_activation(diff);
    const auto& f = model.numeric.features(r)[i];
    return rbf(diff, f.center, f.width);
}

double latent_logit(const PoeModel& model, EntityId h, RelationId r, EntityId t) {
    const auto& p = model.params;
    return distmult(p.entity.col(h.index()), p.entity.col(t.index()), p.relation.col(r.index()));
}

double relational_logit(const PoeModel& model, RelationId r, const Vector& features) {
    const auto& w = model.params.relational.at(r.index());
    if (features.size() != w.size())
        throw DataError("relational feature vector has length " + std::to_string(features.size()) + ", expected " +
                        std::to_string(w.size()));
    double s = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (features[i] != 0) s += features[i] * w[i];
    return s;
}

double relational_logit(const PoeModel& model, RelationId r, std::span<const std::uint32_t> active) {
    const auto& w = model.params.relational.at(r.index());
    double s = 0;
    for (auto i : active) {
        if (i >= w.size()) throw DataError("relational feature index out of range for relation");
        s += w[i];
    }
    return s;
}

double numerical_logit(const PoeModel& model, RelationId r, const Vector& diffs,
                       const Eigen::Array<bool, Eigen::Dynamic, 1>& present) {
    const auto& w = model.params.numerical.at(r.index());
    if (diffs.size() != w.size() || present.size() != w.size() ||
        model.numeric.size(r) != static_cast<std::size_t>(w.size()))
        throw DataError("numeric difference vector has length " + std::to_string(diffs.size()) + ", expected " +
                        std::to_string(w.size()));
    double s = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (present[i]) s += w[i] * numeric_activation(model, r, static_cast<std::size_t>(i), diffs[i]);
    return s;
}

ScoredCandidate score(const PoeModel& model, const CandidateSet& set, std::size_t c) {
    const auto& experts = model.options.experts;
    const RelationId r = set.relation;
    ScoredCandidate out;
    out.triple = set.triple(c);
    if (experts.latent) out.latent = latent_logit(model, set.heads[c], r, set.tails[c]);
    if (experts.relational) out.relational = relational_logit(model, r, set.active_of(c));
    if (experts.numerical) {
        const auto col = static_cast<Eigen::Index>(c);
        out.numerical = numerical_logit(model, r, set.numeric_diff.col(col), set.present.col(col));
    }
    out.total = out.latent + out.relational + out.numerical;
    return out;
}

Vector logits(const PoeModel& model, const CandidateSet& set) {
    Vector s(static_cast<Eigen::Index>(set.size()));
    for (std::size_t c = 0; c < set.size(); ++c) s[static_cast<Eigen::Index>(c)] = score(model, set, c).total;
    return s;
}

Gradients::Gradients(const Parameters& shape)
    : values(shape.zeros_like()),
      entity_flag_(static_cast<std::size_t>(shape.entity.cols()), 0),
      relation_flag_(static_cast<std::size_t>(shape.relation.cols()), 0) {}

void Gradients::touch_entity(EntityId e) {
    if (!entity_flag_[e.index()]) {
        entity_flag_[e.index()] = 1;
        entities_.push_back(e);
    }
}

void Gradients::touch_relation(RelationId r) {
    if (!relation_flag_[r.index()]) {
        relation_flag_[r.index()] = 1;
        relations_.push_back(r);
    }
}

void Gradients::clear() {
    for (EntityId e : entities_) {
        values.entity.col(e.index()).setZero();
        entity_flag_[e.index()] = 0;
    }
    for (RelationId r : relations_) {
        values.relation.col(r.index()).setZero();
        values.relational[r.index()].setZero();
        values.numerical[r.index()].setZero();
        relation_flag_[r.index()] = 0;
    }
    entities_.clear();
    relations_.clear();
}

double loss_and_gradients(const PoeModel& model, std::span<const CandidateSet> batch, Gradients& grads) {
    const auto& experts = model.options.experts;
    const auto& p = model.params;
    auto& g = grads.values;
    double loss = 0;
    for (const auto& set : batch) {
        if (set.size() == 0 || set.positive >= set.size()) throw DataError("candidate set without its positive");
        const RelationId r = set.relation;
        const auto ri = static_cast<Eigen::Index>(r.index());
        const Vector s = logits(model, set);
        const double lse = log_sum_exp(s);
        loss += lse - s[static_cast<Eigen::Index>(set.positive)];
        const Vector prob = (s.array() - lse).exp().matrix();

        grads.touch_relation(r);
        const auto w = p.relation.col(ri);
        for (std::size_t c = 0; c < set.size(); ++c) {
            const auto ci = static_cast<Eigen::Index>(c);
            const double coef = prob[ci] - (c == set.positive ? 1.0 : 0.0);
            if (experts.latent) {
                const EntityId h = set.heads[c], t = set.tails[c];
                const auto eh = p.entity.col(h.index());
                const auto et = p.entity.col(t.index());
                grads.touch_entity(h);
                grads.touch_entity(t);
                g.entity.col(h.index()).array() += coef * et.array() * w.array();
                g.entity.col(t.index()).array() += coef * eh.array() * w.array();
                g.relation.col(ri).array() += coef * eh.array() * et.array();
            }
            if (experts.relational) {
                auto& gr = g.relational[r.index()];
                for (auto i : set.active_of(c)) gr[i] += coef;
            }
            if (experts.numerical) {
                auto& gn = g.numerical[r.index()];
                for (Eigen::Index i = 0; i < gn.size(); ++i)
                    if (set.present(i, ci))
                        gn[i] += coef * numeric_activation(model, r, static_cast<std::size_t>(i), set.numeric_diff(i, ci));
            }
        }
    }
    return loss;
}

}  // namespace kblrn
