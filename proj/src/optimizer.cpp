#include "kblrn/optimizer.hpp"

#include <cmath>

namespace kblrn {

AdamState AdamState::zeros_like(const Parameters& params) {
    AdamState s;
    s.m = params.zeros_like();
    s.v = params.zeros_like();
    return s;
}

namespace {

template <typename P, typename G, typename M, typename V>
void update_block(P&& param, const G& grad, M&& m, V&& v, const AdamState& s, double lr, double c1, double c2) {
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
        const double g = grad[i];
        m[i] = s.beta1 * m[i] + (1 - s.beta1) * g;
        v[i] = s.beta2 * v[i] + (1 - s.beta2) * g * g;
        if (g == 0) continue;
        const double m_hat = m[i] / c1;
        const double v_hat = v[i] / c2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + s.epsilon);
        if (!std::isfinite(param[i])) throw NonFiniteError("parameter became non-finite after an Adam step");
    }
}

template <typename G>
void check_finite(const G& grad) {
    if (!grad.allFinite()) throw NonFiniteError("non-finite gradient");
}

}  // namespace

void adam_step(Parameters& params, const Gradients& grads, AdamState& state, double learning_rate) {
    if (!state.m.same_shape(params) || !state.v.same_shape(params) || !grads.values.same_shape(params))
        throw DataError("optimizer state shape does not match the parameters");
    const auto& g = grads.values;
    for (EntityId e : grads.touched_entities()) check_finite(g.entity.col(e.index()));
    for (RelationId r : grads.touched_relations()) {
        check_finite(g.relation.col(r.index()));
        check_finite(g.relational[r.index()]);
        check_finite(g.numerical[r.index()]);
    }

    ++state.step;
    const double c1 = 1 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1 - std::pow(state.beta2, static_cast<double>(state.step));
    for (EntityId e : grads.touched_entities()) {
        const auto i = e.index();
        update_block(params.entity.col(i), g.entity.col(i), state.m.entity.col(i), state.v.entity.col(i), state, learning_rate, c1, c2);
    }
    for (RelationId r : grads.touched_relations()) {
        const auto i = r.index();
        update_block(params.relation.col(i), g.relation.col(i), state.m.relation.col(i), state.v.relation.col(i), state,
                     learning_rate, c1, c2);
        update_block(params.relational[i], g.relational[i], state.m.relational[i], state.v.relational[i], state,
                     learning_rate, c1, c2);
        update_block(params.numerical[i], g.numerical[i], state.m.numerical[i], state.v.numerical[i], state,
                     learning_rate, c1, c2);
    }
}

}  // namespace kblrn
