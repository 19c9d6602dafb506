#include "kblrn/relational_features.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "kblrn/parallel.hpp"
#include "kblrn/text_io.hpp"

namespace kblrn {

bool PathFormula::operator==(const PathFormula& o) const {
    if (length_ != o.length_) return false;
    for (std::size_t i = 0; i < length_; ++i)
        if (steps_[i] != o.steps_[i]) return false;
    return true;
}

bool PathFormula::operator<(const PathFormula& o) const {
    const std::size_t n = std::min<std::size_t>(length_, o.length_);
    for (std::size_t i = 0; i < n; ++i) {
        if (steps_[i] < o.steps_[i]) return true;
        if (o.steps_[i] < steps_[i]) return false;
    }
    return length_ < o.length_;
}

std::size_t RuleSet::total() const {
    std::size_t n = 0;
    for (const auto& v : rules_) n += v.size();
    return n;
}

namespace {

struct Hop {
    EntityId via;
    PathStep step;
    bool operator<(const Hop& o) const { return std::tie(via, step) < std::tie(o.via, o.step); }
};

// (x, step) such that step connects h to x.
std::vector<Hop> hops_from_head(const TripleStore& store, EntityId h) {
    std::vector<Hop> hops;
    auto out_rel = store.train_out().edge_relations(h);
    auto out_ent = store.train_out().edge_entities(h);
    for (std::size_t i = 0; i < out_rel.size(); ++i) hops.push_back({out_ent[i], {out_rel[i], Direction::Forward}});
    auto in_rel = store.train_in().edge_relations(h);
    auto in_ent = store.train_in().edge_entities(h);
    for (std::size_t i = 0; i < in_rel.size(); ++i) hops.push_back({in_ent[i], {in_rel[i], Direction::Inverse}});
    std::sort(hops.begin(), hops.end());
    return hops;
}

// (x, step) such that step connects x to t.
std::vector<Hop> hops_into_tail(const TripleStore& store, EntityId t) {
    std::vector<Hop> hops;
    auto in_rel = store.train_in().edge_relations(t);
    auto in_ent = store.train_in().edge_entities(t);
    for (std::size_t i = 0; i < in_rel.size(); ++i) hops.push_back({in_ent[i], {in_rel[i], Direction::Forward}});
    auto out_rel = store.train_out().edge_relations(t);
    auto out_ent = store.train_out().edge_entities(t);
    for (std::size_t i = 0; i < out_rel.size(); ++i) hops.push_back({out_ent[i], {out_rel[i], Direction::Inverse}});
    std::sort(hops.begin(), hops.end());
    return hops;
}

// Bodies holding between h and t, deduplicated; excludes (r, Forward).
std::vector<PathFormula> bodies_between(const TripleStore& store, RelationId r, EntityId h, EntityId t) {
    std::vector<PathFormula> bodies;
    const auto from_h = hops_from_head(store, h);
    const auto into_t = hops_into_tail(store, t);

    for (const auto& hop : from_h) {
        if (hop.via != t) continue;
        if (hop.step.relation == r && hop.step.direction == Direction::Forward) continue;
        bodies.push_back(PathFormula::one_hop(hop.step));
    }

    auto a = from_h.begin();
    auto b = into_t.begin();
    while (a != from_h.end() && b != into_t.end()) {
        if (a->via < b->via) {
            ++a;
        } else if (b->via < a->via) {
            ++b;
        } else {
            const EntityId x = a->via;
            auto a_end = a;
            while (a_end != from_h.end() && a_end->via == x) ++a_end;
            auto b_end = b;
            while (b_end != into_t.end() && b_end->via == x) ++b_end;
            for (auto i = a; i != a_end; ++i)
                for (auto j = b; j != b_end; ++j) bodies.push_back(PathFormula::two_hop(i->step, j->step));
            a = a_end;
            b = b_end;
        }
    }
    std::sort(bodies.begin(), bodies.end());
    bodies.erase(std::unique(bodies.begin(), bodies.end()), bodies.end());
    return bodies;
}

std::span<const EntityId> step_forward(const TripleStore& store, const PathStep& step, EntityId from) {
    return step.direction == Direction::Forward ? store.neighbors_out(from, step.relation)
                                                : store.neighbors_in(from, step.relation);
}

std::span<const EntityId> step_backward(const TripleStore& store, const PathStep& step, EntityId to) {
    return step.direction == Direction::Forward ? store.neighbors_in(to, step.relation)
                                                : store.neighbors_out(to, step.relation);
}

bool is_self(RelationId r, const PathFormula& body) {
    return body.length() == 1 && body.step(0).relation == r && body.step(0).direction == Direction::Forward;
}

std::vector<MinedRule> mine_relation(const TripleStore& store, RelationId r, const MiningOptions& options) {
    const auto triples = store.train_of(r);
    std::vector<MinedRule> out;
    if (triples.empty() || triples.size() < options.min_head_support) return out;

    std::map<PathFormula, std::size_t> support;
    for (const auto& tr : triples)
        for (const auto& body : bodies_between(store, r, tr.head, tr.tail)) ++support[body];

    const std::size_t head_count = triples.size();
    for (const auto& [body, count] : support) {
        const double coverage = static_cast<double>(count) / static_cast<double>(head_count);
        if (coverage >= options.min_head_coverage) out.push_back(MinedRule{body, coverage, count, head_count});
    }
    std::stable_sort(out.begin(), out.end(), [](const MinedRule& a, const MinedRule& b) {
        if (*a.coverage != *b.coverage) return *a.coverage > *b.coverage;
        return a.body < b.body;
    });
    return out;
}

}  // namespace

RuleSet mine_rules(const TripleStore& store, const MiningOptions& options) {
    RuleSet rules(store.num_relations());
    parallel_for(store.num_relations(), options.threads, [&](std::size_t i) {
        RelationId r{static_cast<std::uint32_t>(i)};
        rules.rules(r) = mine_relation(store, r, options);
    });
    return rules;
}

bool formula_holds(const TripleStore& store, RelationId r, const PathFormula& body, EntityId h, EntityId t) {
    if (!store.entities().contains(h) || !store.entities().contains(t))
        throw std::out_of_range("entity id outside the vocabulary");
    if (is_self(r, body)) return false;
    if (body.length() == 1) {
        auto next = step_forward(store, body.step(0), h);
        return std::binary_search(next.begin(), next.end(), t);
    }
    auto left = step_forward(store, body.step(0), h);
    auto right = step_backward(store, body.step(1), t);
    if (left.size() > right.size()) std::swap(left, right);
    for (EntityId x : left)
        if (std::binary_search(right.begin(), right.end(), x)) return true;
    return false;
}

std::vector<std::uint32_t> active_formulas(const TripleStore& store, const RuleSet& rules, RelationId r, EntityId h,
                                           EntityId t) {
    std::vector<std::uint32_t> active;
    const auto& list = rules.rules(r);
    for (std::size_t i = 0; i < list.size(); ++i)
        if (formula_holds(store, r, list[i].body, h, t)) active.push_back(static_cast<std::uint32_t>(i));
    return active;
}

Vector relational_vector(const TripleStore& store, const RuleSet& rules, RelationId r, EntityId h, EntityId t) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(rules.size(r)));
    for (auto i : active_formulas(store, rules, r, h, t)) v[i] = 1.0;
    return v;
}

std::vector<EntityId> reachable(const TripleStore& store, RelationId r, const PathFormula& body, EntityId anchor,
                                bool anchor_is_head) {
    std::vector<EntityId> out;
    if (is_self(r, body)) return out;
    if (body.length() == 1) {
        auto next = anchor_is_head ? step_forward(store, body.step(0), anchor) : step_backward(store, body.step(0), anchor);
        return {next.begin(), next.end()};
    }
    if (anchor_is_head) {
        for (EntityId x : step_forward(store, body.step(0), anchor)) {
            auto next = step_forward(store, body.step(1), x);
            out.insert(out.end(), next.begin(), next.end());
        }
    } else {
        for (EntityId x : step_backward(store, body.step(1), anchor)) {
            auto next = step_backward(store, body.step(0), x);
            out.insert(out.end(), next.begin(), next.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string format_body(const PathFormula& body, const Vocabulary<RelationId>& relations) {
    std::string s;
    for (std::size_t i = 0; i < body.length(); ++i) {
        if (i) s += ',';
        s += relations.label(body.step(i).relation);
        s += body.step(i).direction == Direction::Forward ? '+' : '-';
    }
    return s;
}

std::string format_rules(const RuleSet& rules, const Vocabulary<RelationId>& relations) {
    std::string out;
    for (std::size_t ri = 0; ri < rules.num_relations(); ++ri) {
        RelationId r{static_cast<std::uint32_t>(ri)};
        for (const auto& rule : rules.rules(r)) {
            out += relations.label(r);
            out += '\t';
            out += format_body(rule.body, relations);
            if (rule.coverage) {
                out += '\t' + format_double(*rule.coverage);
                out += '\t' + std::to_string(rule.support) + '\t' + std::to_string(rule.head_count);
            }
            out += '\n';
        }
    }
    return out;
}

RuleSet parse_rules(std::string_view text, const Vocabulary<RelationId>& relations, const std::string& source) {
    RuleSet rules(relations.size());
    auto relation_of = [&](std::string_view label, std::size_t number) {
        auto id = relations.find(label);
        if (!id) throw ParseError(source, number, "unknown relation '" + std::string(label) + "'");
        return *id;
    };
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        if (line.empty() || line.front() == '#') return;
        auto cols = split(line, '\t');
        if (cols.size() != 2 && cols.size() != 3 && cols.size() != 5)
            throw ParseError(source, number, "expected 2, 3 or 5 tab-separated columns");
        const RelationId head = relation_of(cols[0], number);
        auto parts = split(cols[1], ',');
        if (parts.size() > 2) throw ParseError(source, number, "rule bodies have at most two atoms");
        std::vector<PathStep> steps;
        for (auto part : parts) {
            if (part.size() < 2 || (part.back() != '+' && part.back() != '-'))
                throw ParseError(source, number, "body atom must end in '+' or '-': '" + std::string(part) + "'");
            const Direction dir = part.back() == '+' ? Direction::Forward : Direction::Inverse;
            part.remove_suffix(1);
            steps.push_back(PathStep{relation_of(part, number), dir});
        }
        MinedRule rule{steps.size() == 1 ? PathFormula::one_hop(steps[0]) : PathFormula::two_hop(steps[0], steps[1]),
                       std::nullopt, 0, 0};
        try {
            if (cols.size() >= 3) rule.coverage = parse_double(cols[2]);
            if (cols.size() == 5) {
                rule.support = static_cast<std::size_t>(parse_int(cols[3]));
                rule.head_count = static_cast<std::size_t>(parse_int(cols[4]));
            }
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, number, e.what());
        }
        rules.rules(head).push_back(rule);
    });
    return rules;
}

void save_rules(const RuleSet& rules, const Vocabulary<RelationId>& relations, const std::filesystem::path& path) {
    write_file(path, format_rules(rules, relations));
}

RuleSet load_rules(const std::filesystem::path& path, const Vocabulary<RelationId>& relations) {
    return parse_rules(read_file(path), relations, path.string());
}

}  // namespace kblrn
