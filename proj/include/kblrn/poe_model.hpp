#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kblrn/features.hpp"
#include "kblrn/numerical_features.hpp"
#include "kblrn/relational_features.hpp"
#include "kblrn/types.hpp"

namespace kblrn {

enum class NumericTransform { Rbf, Sign };

std::string to_string(NumericTransform t);
NumericTransform parse_numeric_transform(std::string_view s);

// Which experts contribute to the product. Named after the model variants:
// "l", "r", "n", "lr", "ln", "rn", "lrn".
struct Experts {
    bool latent = true;
    bool relational = true;
    bool numerical = true;

    std::string name() const;
    static Experts parse(std::string_view s);
    bool operator==(const Experts&) const = default;
};

// All learnable parameters. Column e of `entity` is e_e; column r of
// `relation` is the DistMult weight w^r.
template <typename Scalar>
struct BasicParameters {
    MatrixX<Scalar> entity;
    MatrixX<Scalar> relation;
    std::vector<VectorX<Scalar>> relational;  // w^r_rel
    std::vector<VectorX<Scalar>> numerical;   // w^r_num

    template <typename To>
    BasicParameters<To> cast() const {
        BasicParameters<To> out;
        out.entity = entity.template cast<To>();
        out.relation = relation.template cast<To>();
        for (const auto& v : relational) out.relational.push_back(v.template cast<To>());
        for (const auto& v : numerical) out.numerical.push_back(v.template cast<To>());
        return out;
    }

    BasicParameters zeros_like() const {
        BasicParameters out;
        out.entity = MatrixX<Scalar>::Zero(entity.rows(), entity.cols());
        out.relation = MatrixX<Scalar>::Zero(relation.rows(), relation.cols());
        for (const auto& v : relational) out.relational.push_back(VectorX<Scalar>::Zero(v.size()));
        for (const auto& v : numerical) out.numerical.push_back(VectorX<Scalar>::Zero(v.size()));
        return out;
    }

    bool same_shape(const BasicParameters& o) const {
        if (entity.rows() != o.entity.rows() || entity.cols() != o.entity.cols()) return false;
        if (relation.rows() != o.relation.rows() || relation.cols() != o.relation.cols()) return false;
        if (relational.size() != o.relational.size() || numerical.size() != o.numerical.size()) return false;
        for (std::size_t i = 0; i < relational.size(); ++i)
            if (relational[i].size() != o.relational[i].size()) return false;
        for (std::size_t i = 0; i < numerical.size(); ++i)
            if (numerical[i].size() != o.numerical[i].size()) return false;
        return true;
    }

    bool all_finite() const {
        if (!entity.allFinite() || !relation.allFinite()) return false;
        for (const auto& v : relational)
            if (!v.allFinite()) return false;
        for (const auto& v : numerical)
            if (!v.allFinite()) return false;
        return true;
    }

    bool operator==(const BasicParameters& o) const {
        if (!same_shape(o)) return false;
        if (entity != o.entity || relation != o.relation) return false;
        for (std::size_t i = 0; i < relational.size(); ++i)
            if (relational[i] != o.relational[i]) return false;
        for (std::size_t i = 0; i < numerical.size(); ++i)
            if (numerical[i] != o.numerical[i]) return false;
        return true;
    }
};

using Parameters = BasicParameters<double>;

struct ModelOptions {
    int dim = 100;
    Experts experts;
    NumericTransform transform = NumericTransform::Rbf;
};

struct PoeModel {
    ModelOptions options;
    Parameters params;
    // Fixed RBF centres and widths; the selected feature lists define d_n(r).
    RelationNumericSpec numeric;

    std::size_t num_entities() const { return static_cast<std::size_t>(params.entity.cols()); }
    std::size_t num_relations() const { return static_cast<std::size_t>(params.relation.cols()); }
};

// Glorot-uniform initialization; RBF parameters copied from `numeric`.
PoeModel init_model(std::size_t num_entities, const RuleSet& rules, const RelationNumericSpec& numeric,
                    const ModelOptions& options, std::uint64_t seed);
PoeModel init_model(const TripleStore& store, const RuleSet& rules, const RelationNumericSpec& numeric,
                    const ModelOptions& options, std::uint64_t seed);

// Uniform bound sqrt(6 / (fan_in + fan_out)).
inline double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// (e_h * e_t) . w, summed in index order so every caller gets the same bits.
template <typename A, typename B, typename C>
typename A::Scalar distmult(const Eigen::MatrixBase<A>& eh, const Eigen::MatrixBase<B>& et,
                            const Eigen::MatrixBase<C>& w) {
    typename A::Scalar s = 0;
    for (Eigen::Index j = 0; j < eh.size(); ++j) s += eh[j] * et[j] * w[j];
    return s;
}

inline double rbf(double x, double center, double width) {
    const double d = x - center;
    return std::exp(-(d * d) / (width * width));
}

inline double sign_activation(double x) { return x >= 0 ? 1.0 : -1.0; }

// phi applied to one difference of selected feature i of relation r.
double numeric_activation(const PoeModel& model, RelationId r, std::size_t i, double diff);

double latent_logit(const PoeModel& model, EntityId h, RelationId r, EntityId t);

// r_(h,t) . w^r_rel for a dense 0/1 feature vector.
double relational_logit(const PoeModel& model, RelationId r, const Vector& features);
double relational_logit(const PoeModel& model, RelationId r, std::span<const std::uint32_t> active);

// phi(n_(h,t)) . w^r_num; absent entries contribute nothing.
double numerical_logit(const PoeModel& model, RelationId r, const Vector& diffs,
                       const Eigen::Array<bool, Eigen::Dynamic, 1>& present);

struct ScoredCandidate {
    Triple triple;
    double latent = 0;
    double relational = 0;
    double numerical = 0;
    double total = 0;
};

// Expert log-scores of candidate c; disabled experts contribute exactly 0.
ScoredCandidate score(const PoeModel& model, const CandidateSet& set, std::size_t c);
Vector logits(const PoeModel& model, const CandidateSet& set);

template <typename D>
double log_sum_exp(const Eigen::MatrixBase<D>& x) {
    const double m = x.maxCoeff();
    return m + std::log((x.array() - m).exp().sum());
}

template <typename D>
Vector softmax(const Eigen::MatrixBase<D>& x) {
    const double m = x.maxCoeff();
    Vector e = (x.array() - m).exp().matrix();
    return e / e.sum();
}

// Gradient accumulator shaped like the parameters; records which entity
// columns and relations received a contribution.
class Gradients {
   public:
    Gradients() = default;
    explicit Gradients(const Parameters& shape);

    Parameters values;

    void touch_entity(EntityId e);
    void touch_relation(RelationId r);
    const std::vector<EntityId>& touched_entities() const { return entities_; }
    const std::vector<RelationId>& touched_relations() const { return relations_; }
    // Zeroes the touched blocks and forgets them.
    void clear();

   private:
    std::vector<EntityId> entities_;
    std::vector<RelationId> relations_;
    std::vector<char> entity_flag_, relation_flag_;
};

// Cross-entropy of every set's positive under the softmax over its
// candidates. Adds d(loss)/d(theta) into `grads` and returns the summed loss.
double loss_and_gradients(const PoeModel& model, std::span<const CandidateSet> batch, Gradients& grads);

}  // namespace kblrn
