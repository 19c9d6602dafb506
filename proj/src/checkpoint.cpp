#include "kblrn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <zlib.h>

#include "kblrn/text_io.hpp"

namespace kblrn {

namespace {

constexpr char kMagic[8] = {'K', 'B', 'L', 'R', 'N', 'C', 'K', 'P'};
constexpr std::uint32_t kFlagF32 = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
   public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}
    std::uint64_t u(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::string_view take(std::uint64_t n) {
        need(n);
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

   private:
    void need(std::uint64_t n) const {
        if (n > bytes_.size() - pos_) throw CorruptionError("checkpoint is truncated");
    }
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t checksum(std::string_view bytes) {
    return static_cast<std::uint32_t>(
        crc32_z(crc32_z(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(bytes.data()), bytes.size()));
}

std::string vocab_text(const std::vector<std::string>& labels) {
    std::string s;
    for (const auto& l : labels) s += l + "\n";
    return s;
}

template <typename IdT>
Vocabulary<IdT> vocab_from(std::string_view text) {
    Vocabulary<IdT> v;
    for_each_line(text, [&](std::string_view line, std::size_t) {
        const auto before = v.size();
        if (v.intern(line).index() != before) throw CorruptionError("duplicate vocabulary label in checkpoint");
    });
    return v;
}

struct TensorRef {
    std::string name;
    std::vector<std::int64_t> shape;
    const double* data;
    std::size_t count;
};

void collect(std::vector<TensorRef>& out, const std::string& prefix, const Parameters& p) {
    out.push_back({prefix + "entity_embeddings", {p.entity.rows(), p.entity.cols()}, p.entity.data(),
                   static_cast<std::size_t>(p.entity.size())});
    out.push_back({prefix + "relation_latent", {p.relation.rows(), p.relation.cols()}, p.relation.data(),
                   static_cast<std::size_t>(p.relation.size())});
    for (std::size_t r = 0; r < p.relational.size(); ++r)
        out.push_back({prefix + "relational/" + std::to_string(r), {p.relational[r].size()}, p.relational[r].data(),
                       static_cast<std::size_t>(p.relational[r].size())});
    for (std::size_t r = 0; r < p.numerical.size(); ++r)
        out.push_back({prefix + "numerical/" + std::to_string(r), {p.numerical[r].size()}, p.numerical[r].data(),
                       static_cast<std::size_t>(p.numerical[r].size())});
}

// Expected tensor name -> (shape, destination).
struct Slot {
    std::vector<std::int64_t> shape;
    double* data;
    bool filled = false;
};

void expect(std::map<std::string, Slot>& slots, const std::string& prefix, Parameters& p) {
    slots[prefix + "entity_embeddings"] = {{p.entity.rows(), p.entity.cols()}, p.entity.data()};
    slots[prefix + "relation_latent"] = {{p.relation.rows(), p.relation.cols()}, p.relation.data()};
    for (std::size_t r = 0; r < p.relational.size(); ++r)
        slots[prefix + "relational/" + std::to_string(r)] = {{p.relational[r].size()}, p.relational[r].data()};
    for (std::size_t r = 0; r < p.numerical.size(); ++r)
        slots[prefix + "numerical/" + std::to_string(r)] = {{p.numerical[r].size()}, p.numerical[r].data()};
}

Parameters shaped(int dim, std::size_t entities, const RuleSet& rules, const RelationNumericSpec& spec) {
    Parameters p;
    p.entity = Matrix::Zero(dim, static_cast<Eigen::Index>(entities));
    p.relation = Matrix::Zero(dim, static_cast<Eigen::Index>(rules.num_relations()));
    for (std::size_t r = 0; r < rules.num_relations(); ++r) {
        const RelationId rid{static_cast<std::uint32_t>(r)};
        p.relational.push_back(Vector::Zero(static_cast<Eigen::Index>(rules.size(rid))));
        p.numerical.push_back(Vector::Zero(static_cast<Eigen::Index>(spec.size(rid))));
    }
    return p;
}

std::string shape_text(const std::vector<std::int64_t>& shape) {
    std::string s;
    for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
    return s;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck, bool f32) {
    std::vector<std::pair<std::string, std::string>> sections;
    sections.emplace_back("entities", vocab_text(ck.entities.labels()));
    sections.emplace_back("relations", vocab_text(ck.relations.labels()));
    sections.emplace_back("features", vocab_text(ck.features.labels()));
    sections.emplace_back("config", format(ck.config));
    sections.emplace_back("model", "dim=" + std::to_string(ck.model.options.dim) +
                                       "\nablation=" + ck.model.options.experts.name() +
                                       "\nnumeric_transform=" + to_string(ck.model.options.transform) + "\n");
    sections.emplace_back("rules", format_rules(ck.rules, ck.relations));
    sections.emplace_back("numeric_spec", format_numeric_spec(ck.model.numeric, ck.relations, ck.features));
    if (ck.adam) {
        sections.emplace_back("adam", "step=" + std::to_string(ck.adam->step) + "\nbeta1=" +
                                          format_double(ck.adam->beta1) + "\nbeta2=" + format_double(ck.adam->beta2) +
                                          "\nepsilon=" + format_double(ck.adam->epsilon) + "\n");
    }

    std::vector<TensorRef> tensors;
    collect(tensors, "", ck.model.params);
    if (ck.adam) {
        collect(tensors, "adam.m/", ck.adam->m);
        collect(tensors, "adam.v/", ck.adam->v);
    }
    const std::size_t elem = f32 ? 4 : 8;
    std::string directory;
    std::uint64_t offset = 0;
    for (const auto& t : tensors) {
        directory += t.name + "\t" + (f32 ? "f32" : "f64") + "\t" + shape_text(t.shape) + "\t" + std::to_string(offset) +
                     "\t" + std::to_string(t.count) + "\n";
        offset += t.count * elem;
    }
    sections.emplace_back("tensors", directory);

    std::string header;
    for (const auto& [name, body] : sections) {
        put_u32(header, static_cast<std::uint32_t>(name.size()));
        header += name;
        put_u64(header, body.size());
        header += body;
    }

    std::string out(kMagic, sizeof kMagic);
    put_u32(out, Checkpoint::kVersion);
    put_u32(out, f32 ? kFlagF32 : 0);
    put_u64(out, header.size());
    out += header;
    put_u64(out, offset);
    out.reserve(out.size() + offset + 4);
    for (const auto& t : tensors) {
        for (std::size_t i = 0; i < t.count; ++i) {
            if (f32)
                put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(t.data[i])));
            else
                put_u64(out, std::bit_cast<std::uint64_t>(t.data[i]));
        }
    }
    put_u32(out, checksum(out));
    return out;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path, bool f32) {
    write_file(path, serialize_checkpoint(checkpoint, f32));
}

Checkpoint deserialize_checkpoint(std::string_view bytes, std::optional<int> expected_dim) {
    if (bytes.size() < sizeof kMagic + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw CorruptionError("not a checkpoint file (bad magic)");
    Reader pre(bytes.substr(sizeof kMagic));
    const auto version = static_cast<std::uint32_t>(pre.u(4));
    if (version != Checkpoint::kVersion)
        throw UnsupportedVersionError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                                      std::to_string(Checkpoint::kVersion) + ")");
    if (bytes.size() < sizeof kMagic + 24 + 4) throw CorruptionError("checkpoint is truncated");
    const auto body = bytes.substr(0, bytes.size() - 4);
    Reader tail(bytes.substr(bytes.size() - 4));
    if (static_cast<std::uint32_t>(tail.u(4)) != checksum(body)) throw CorruptionError("checkpoint checksum mismatch");

    Reader in(body.substr(sizeof kMagic + 4));
    const auto flags = static_cast<std::uint32_t>(in.u(4));
    const bool f32 = flags & kFlagF32;
    Reader header(in.take(in.u(8)));
    std::map<std::string, std::string_view> sections;
    while (header.remaining()) {
        std::string name(header.take(header.u(4)));
        sections[name] = header.take(header.u(8));
    }
    auto section = [&](const std::string& name) -> std::string_view {
        auto it = sections.find(name);
        if (it == sections.end()) throw SchemaError("checkpoint lacks section '" + name + "'");
        return it->second;
    };

    Checkpoint ck;
    ck.entities = vocab_from<EntityId>(section("entities"));
    ck.relations = vocab_from<RelationId>(section("relations"));
    ck.features = vocab_from<FeatureId>(section("features"));
    try {
        kblrn::apply(ck.config, parse_key_values(section("config"), "checkpoint:config"));
        const auto model_kv = parse_key_values(section("model"), "checkpoint:model");
        ck.model.options.dim = static_cast<int>(parse_int(model_kv.at("dim")));
        ck.model.options.experts = Experts::parse(model_kv.at("ablation"));
        ck.model.options.transform = parse_numeric_transform(model_kv.at("numeric_transform"));
    } catch (const std::out_of_range&) {
        throw SchemaError("checkpoint model section is incomplete");
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("checkpoint metadata: ") + e.what());
    }
    ck.rules = parse_rules(section("rules"), ck.relations, "checkpoint:rules");
    ck.model.numeric = parse_numeric_spec(section("numeric_spec"), ck.relations, ck.features, "checkpoint:numeric_spec");

    const int dim = expected_dim.value_or(ck.model.options.dim);
    ck.model.params = shaped(dim, ck.entities.size(), ck.rules, ck.model.numeric);
    std::map<std::string, Slot> slots;
    expect(slots, "", ck.model.params);
    if (sections.count("adam")) {
        AdamState adam;
        const auto kv = parse_key_values(sections["adam"], "checkpoint:adam");
        try {
            adam.step = parse_int(kv.at("step"));
            adam.beta1 = parse_double(kv.at("beta1"));
            adam.beta2 = parse_double(kv.at("beta2"));
            adam.epsilon = parse_double(kv.at("epsilon"));
        } catch (const std::exception&) {
            throw SchemaError("checkpoint adam section is malformed");
        }
        adam.m = ck.model.params.zeros_like();
        adam.v = ck.model.params.zeros_like();
        ck.adam = std::move(adam);
        expect(slots, "adam.m/", ck.adam->m);
        expect(slots, "adam.v/", ck.adam->v);
    }

    const std::uint64_t payload_size = in.u(8);
    const std::string_view payload = in.take(payload_size);
    if (in.remaining() != 0) throw CorruptionError("trailing bytes after checkpoint payload");
    const std::size_t elem = f32 ? 4 : 8;
    for_each_line(section("tensors"), [&](std::string_view line, std::size_t) {
        auto cols = split(line, '\t');
        if (cols.size() != 5) throw SchemaError("malformed tensor directory entry");
        const std::string name(cols[0]);
        auto it = slots.find(name);
        if (it == slots.end()) throw SchemaError("unknown tensor '" + name + "'");
        if (cols[1] != (f32 ? "f32" : "f64")) throw SchemaError("tensor '" + name + "' has unexpected dtype");
        if (cols[2] != shape_text(it->second.shape))
            throw SchemaError("tensor '" + name + "' has shape [" + std::string(cols[2]) + "], expected [" +
                              shape_text(it->second.shape) + "]");
        const auto offset = static_cast<std::uint64_t>(parse_int(cols[3]));
        const auto count = static_cast<std::uint64_t>(parse_int(cols[4]));
        if (offset > payload.size() || count * elem > payload.size() - offset)
            throw CorruptionError("tensor '" + name + "' lies outside the payload");
        Reader data(payload.substr(offset, count * elem));
        for (std::uint64_t i = 0; i < count; ++i) {
            it->second.data[i] = f32 ? static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(data.u(4))))
                                     : std::bit_cast<double>(data.u(8));
        }
        it->second.filled = true;
    });
    for (const auto& [name, slot] : slots)
        if (!slot.filled) throw SchemaError("checkpoint lacks tensor '" + name + "'");
    if (!ck.model.params.all_finite()) throw CorruptionError("checkpoint holds non-finite parameters");
    return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<int> expected_dim) {
    return deserialize_checkpoint(read_file(path), expected_dim);
}

}  // namespace kblrn
