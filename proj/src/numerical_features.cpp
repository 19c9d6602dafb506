#include "kblrn/numerical_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kblrn/parallel.hpp"
#include "kblrn/text_io.hpp"

namespace kblrn {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
}

NumericTable::NumericTable(std::size_t num_entities, Vocabulary<FeatureId> features, Matrix values)
    : features_(std::move(features)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != num_entities ||
        static_cast<std::size_t>(values_.cols()) != features_.size())
        throw DataError("numeric table shape does not match its vocabularies");
}

NumericTable NumericTable::parse(std::string_view text, const Vocabulary<EntityId>& entities,
                                 NumericLoadReport* report, const std::string& source) {
    struct Row {
        EntityId entity;
        FeatureId feature;
        double value;
    };
    NumericLoadReport local;
    Vocabulary<FeatureId> features;
    std::vector<Row> rows;
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        if (line.empty()) return;
        auto cols = split(line, '\t');
        if (cols.size() != 3) throw ParseError(source, number, "expected 3 tab-separated columns");
        double value = 0;
        try {
            value = parse_double(cols[2]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, number, e.what());
        }
        if (!std::isfinite(value)) throw ParseError(source, number, "value is not finite");
        ++local.rows;
        auto entity = entities.find(cols[0]);
        if (!entity) {
            local.unknown_entities.emplace_back(cols[0]);
            return;
        }
        rows.push_back(Row{*entity, features.intern(cols[1]), value});
    });

    Matrix values = Matrix::Constant(static_cast<Eigen::Index>(entities.size()),
                                     static_cast<Eigen::Index>(features.size()), kMissing);
    for (const auto& row : rows) {
        double& slot = values(row.entity.index(), row.feature.index());
        if (std::isnan(slot)) {
            slot = row.value;
            ++local.stored;
        } else {
            ++local.duplicates;
        }
    }
    if (report) *report = std::move(local);
    return NumericTable(entities.size(), std::move(features), std::move(values));
}

NumericTable NumericTable::load(const std::filesystem::path& path, const Vocabulary<EntityId>& entities,
                                NumericLoadReport* report) {
    return parse(read_file(path), entities, report, path.string());
}

bool NumericTable::has(EntityId e, FeatureId f) const {
    if (e.index() >= num_entities() || f.index() >= num_features()) return false;
    return !std::isnan(values_(e.index(), f.index()));
}

std::size_t NumericTable::covered_entities() const {
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
        if (!values_.row(i).array().isNaN().all()) ++n;
    return n;
}

std::size_t RelationNumericSpec::relations_with_features() const {
    return static_cast<std::size_t>(
        std::count_if(features_.begin(), features_.end(), [](const auto& v) { return !v.empty(); }));
}

std::vector<FeatureSupport> select_features(const TripleStore& store, const NumericTable& table, RelationId r,
                                            double tau) {
    std::vector<FeatureSupport> out;
    const auto triples = store.train_of(r);
    if (triples.empty()) return out;
    for (std::size_t fi = 0; fi < table.num_features(); ++fi) {
        FeatureId f{static_cast<std::uint32_t>(fi)};
        std::size_t support = 0;
        for (const auto& t : triples)
            if (table.has(t.head, f) && table.has(t.tail, f)) ++support;
        if (support > 0 && static_cast<double>(support) / static_cast<double>(triples.size()) >= tau)
            out.push_back({f, support});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const FeatureSupport& a, const FeatureSupport& b) { return a.support > b.support; });
    return out;
}

RbfFeature fit_rbf(const TripleStore& store, const NumericTable& table, RelationId r, FeatureId feature,
                   double sigma_floor) {
    std::vector<double> diffs;
    for (const auto& t : store.train_of(r))
        if (table.has(t.head, feature) && table.has(t.tail, feature))
            diffs.push_back(table.value(t.head, feature) - table.value(t.tail, feature));
    if (diffs.empty())
        throw DataError("cannot fit RBF for relation " + store.relations().label(r) + ": no training pair has feature " +
                        table.features().label(feature) + " on both sides");
    const Eigen::Map<const Vector> d(diffs.data(), static_cast<Eigen::Index>(diffs.size()));
    const double n = static_cast<double>(diffs.size());
    const double center = d.sum() / n;
    const double width = std::sqrt((d.array() - center).square().sum() / n);
    return RbfFeature{feature, center, std::max(width, sigma_floor), diffs.size()};
}

RelationNumericSpec build_numeric_spec(const TripleStore& store, const NumericTable& table,
                                       const NumericSpecOptions& options) {
    RelationNumericSpec spec(store.num_relations());
    parallel_for(store.num_relations(), options.threads, [&](std::size_t i) {
        RelationId r{static_cast<std::uint32_t>(i)};
        for (const auto& sel : select_features(store, table, r, options.tau))
            spec.features(r).push_back(fit_rbf(store, table, r, sel.feature, options.sigma_floor));
    });
    return spec;
}

NumericDiff numeric_diff_vector(const NumericTable& table, const RelationNumericSpec& spec, RelationId r, EntityId h,
                                EntityId t) {
    const auto& features = spec.features(r);
    const auto n = static_cast<Eigen::Index>(features.size());
    NumericDiff out{Vector::Zero(n), Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const FeatureId f = features[static_cast<std::size_t>(i)].feature;
        if (table.has(h, f) && table.has(t, f)) {
            out.values[i] = table.value(h, f) - table.value(t, f);
            out.present[i] = true;
        }
    }
    return out;
}

std::string format_numeric_spec(const RelationNumericSpec& spec, const Vocabulary<RelationId>& relations,
                                const Vocabulary<FeatureId>& features) {
    std::string out;
    for (std::size_t ri = 0; ri < spec.num_relations(); ++ri) {
        RelationId r{static_cast<std::uint32_t>(ri)};
        for (const auto& f : spec.features(r)) {
            out += relations.label(r) + '\t' + features.label(f.feature) + '\t' + format_double(f.center) + '\t' +
                   format_double(f.width) + '\t' + std::to_string(f.support) + '\n';
        }
    }
    return out;
}

RelationNumericSpec parse_numeric_spec(std::string_view text, const Vocabulary<RelationId>& relations,
                                       const Vocabulary<FeatureId>& features, const std::string& source) {
    RelationNumericSpec spec(relations.size());
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        if (line.empty()) return;
        auto cols = split(line, '\t');
        if (cols.size() != 5) throw ParseError(source, number, "expected 5 tab-separated columns");
        auto r = relations.find(cols[0]);
        if (!r) throw ParseError(source, number, "unknown relation '" + std::string(cols[0]) + "'");
        auto f = features.find(cols[1]);
        if (!f) throw ParseError(source, number, "unknown numeric feature '" + std::string(cols[1]) + "'");
        try {
            RbfFeature rbf{*f, parse_double(cols[2]), parse_double(cols[3]),
                           static_cast<std::size_t>(parse_int(cols[4]))};
            if (!(rbf.width > 0)) throw ParseError(source, number, "sigma must be positive");
            spec.features(*r).push_back(rbf);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, number, e.what());
        }
    });
    return spec;
}

}  // namespace kblrn
