#include "kblrn/kb_store.hpp"

#include <algorithm>
#include <sstream>

#include "kblrn/text_io.hpp"

namespace kblrn {

const char* split_name(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

AdjacencyIndex::AdjacencyIndex(std::size_t num_entities, std::vector<Triple> keyed) {
    std::sort(keyed.begin(), keyed.end());
    offsets_.assign(num_entities + 1, 0);
    relations_.reserve(keyed.size());
    entities_.reserve(keyed.size());
    for (const auto& k : keyed) {
        ++offsets_[k.head.index() + 1];
        relations_.push_back(k.relation);
        entities_.push_back(k.tail);
    }
    for (std::size_t i = 0; i < num_entities; ++i) offsets_[i + 1] += offsets_[i];
}

std::span<const EntityId> AdjacencyIndex::neighbors(EntityId key, RelationId relation) const {
    if (key.index() + 1 >= offsets_.size()) return {};
    auto first = relations_.begin() + static_cast<std::ptrdiff_t>(offsets_[key.index()]);
    auto last = relations_.begin() + static_cast<std::ptrdiff_t>(offsets_[key.index() + 1]);
    auto [lo, hi] = std::equal_range(first, last, relation);
    return std::span<const EntityId>(entities_.data() + (lo - relations_.begin()), static_cast<std::size_t>(hi - lo));
}

std::span<const RelationId> AdjacencyIndex::edge_relations(EntityId key) const {
    if (key.index() + 1 >= offsets_.size()) return {};
    return std::span<const RelationId>(relations_.data() + offsets_[key.index()], degree(key));
}

std::span<const EntityId> AdjacencyIndex::edge_entities(EntityId key) const {
    if (key.index() + 1 >= offsets_.size()) return {};
    return std::span<const EntityId>(entities_.data() + offsets_[key.index()], degree(key));
}

std::size_t AdjacencyIndex::degree(EntityId key) const {
    if (key.index() + 1 >= offsets_.size()) return 0;
    return offsets_[key.index() + 1] - offsets_[key.index()];
}

std::string LoadReport::to_string() const {
    std::ostringstream os;
    os << "entities\t" << entities << "\n"
       << "relations\t" << relations << "\n";
    for (Split s : kAllSplits) {
        os << split_name(s) << "_triples\t" << triples[static_cast<int>(s)] << "\n";
        os << split_name(s) << "_duplicates\t" << duplicates[static_cast<int>(s)] << "\n";
    }
    os << "entities_unseen_in_train\t" << unseen_in_train.size() << "\n";
    return os.str();
}

TripleStore::TripleStore(Vocabulary<EntityId> entities, Vocabulary<RelationId> relations,
                         std::array<std::vector<Triple>, 3> splits, LoadReport* report)
    : entities_(std::move(entities)), relations_(std::move(relations)) {
    LoadReport local;
    const std::size_t ne = entities_.size();
    std::vector<Triple> out_all, in_all;
    for (Split s : kAllSplits) {
        auto& src = splits[static_cast<int>(s)];
        auto& dst = splits_[static_cast<int>(s)];
        std::unordered_set<Triple, TripleHash> seen;
        dst.reserve(src.size());
        for (const auto& t : src) {
            check_ids(t);
            if (seen.insert(t).second)
                dst.push_back(t);
            else
                ++local.duplicates[static_cast<int>(s)];
        }
        local.triples[static_cast<int>(s)] = dst.size();
        for (const auto& t : dst) {
            if (known_.insert(t).second) {
                out_all.push_back(t);
                in_all.push_back(Triple{t.tail, t.relation, t.head});
            }
        }
    }

    const auto& train = splits_[static_cast<int>(Split::Train)];
    std::vector<Triple> out_train(train.begin(), train.end());
    std::vector<Triple> in_train;
    in_train.reserve(train.size());
    for (const auto& t : train) in_train.push_back(Triple{t.tail, t.relation, t.head});
    train_out_ = AdjacencyIndex(ne, std::move(out_train));
    train_in_ = AdjacencyIndex(ne, std::move(in_train));
    known_out_ = AdjacencyIndex(ne, std::move(out_all));
    known_in_ = AdjacencyIndex(ne, std::move(in_all));

    train_by_relation_.assign(train.begin(), train.end());
    std::sort(train_by_relation_.begin(), train_by_relation_.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.relation, a.head, a.tail) < std::tie(b.relation, b.head, b.tail);
    });
    relation_offsets_.assign(relations_.size() + 1, 0);
    for (const auto& t : train_by_relation_) ++relation_offsets_[t.relation.index() + 1];
    for (std::size_t i = 0; i < relations_.size(); ++i) relation_offsets_[i + 1] += relation_offsets_[i];

    if (report) {
        std::vector<char> in_train(ne, 0);
        for (const auto& t : train) in_train[t.head.index()] = in_train[t.tail.index()] = 1;
        for (std::size_t e = 0; e < ne; ++e)
            if (!in_train[e]) local.unseen_in_train.push_back(entities_.label(EntityId(static_cast<std::uint32_t>(e))));
        local.entities = ne;
        local.relations = relations_.size();
        *report = std::move(local);
    }
}

void TripleStore::check_ids(const Triple& t) const {
    if (!entities_.contains(t.head) || !entities_.contains(t.tail) || !relations_.contains(t.relation))
        throw DataError("triple refers to an id outside the vocabulary");
}

TripleStore TripleStore::load(const std::filesystem::path& train, const std::filesystem::path& valid,
                              const std::filesystem::path& test, LoadReport* report) {
    Vocabulary<EntityId> entities;
    Vocabulary<RelationId> relations;
    std::array<std::vector<Triple>, 3> splits;
    const std::array<const std::filesystem::path*, 3> paths{&train, &valid, &test};
    for (int s = 0; s < 3; ++s) {
        if (paths[s]->empty()) continue;
        const std::string source = paths[s]->string();
        const std::string text = read_file(*paths[s]);
        for_each_line(text, [&](std::string_view line, std::size_t number) {
            if (line.empty()) return;
            auto cols = split(line, '\t');
            if (cols.size() != 3)
                throw ParseError(source, number, "expected 3 tab-separated columns, got " + std::to_string(cols.size()));
            for (auto c : cols)
                if (c.empty()) throw ParseError(source, number, "empty entity or relation token");
            EntityId h = entities.intern(cols[0]);
            RelationId r = relations.intern(cols[1]);
            EntityId t = entities.intern(cols[2]);
            splits[s].push_back(Triple{h, r, t});
        });
    }
    return TripleStore(std::move(entities), std::move(relations), std::move(splits), report);
}

bool TripleStore::train_has(EntityId h, RelationId r, EntityId t) const {
    auto tails = neighbors_out(h, r);
    return std::binary_search(tails.begin(), tails.end(), t);
}

std::span<const Triple> TripleStore::train_of(RelationId r) const {
    if (r.index() >= relations_.size()) return {};
    return std::span<const Triple>(train_by_relation_.data() + relation_offsets_[r.index()],
                                   relation_offsets_[r.index() + 1] - relation_offsets_[r.index()]);
}

std::string TripleStore::vocabulary_dump_entities() const {
    std::string out;
    for (std::size_t i = 0; i < entities_.size(); ++i) out += std::to_string(i) + "\t" + entities_.labels()[i] + "\n";
    return out;
}

std::string TripleStore::vocabulary_dump_relations() const {
    std::string out;
    for (std::size_t i = 0; i < relations_.size(); ++i) out += std::to_string(i) + "\t" + relations_.labels()[i] + "\n";
    return out;
}

}  // namespace kblrn
