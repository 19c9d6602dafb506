#include "kblrn/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "kblrn/checkpoint.hpp"
#include "kblrn/evaluator.hpp"
#include "kblrn/parallel.hpp"
#include "kblrn/text_io.hpp"
#include "kblrn/trainer.hpp"

namespace kblrn::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    // shared
    std::optional<std::string> config_file;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
    std::optional<std::string> ablation;
    std::optional<std::string> numeric_transform;
    std::optional<unsigned> threads;
    std::string out = ".";
    // data
    std::optional<std::string> data_dir, train, valid, test, numeric;
    std::optional<std::string> rules_file, numeric_spec_file;
    // features
    std::optional<double> min_head_coverage, tau, sigma_floor;
    std::optional<std::size_t> min_head_support;
    // training
    std::optional<double> learning_rate;
    std::optional<std::size_t> batch_size, negatives, epochs, validate_every;
    std::optional<int> dim;
    bool f32 = false;
    // eval / predict / prauc
    std::string checkpoint;
    std::string split = "test";
    bool cardinality = false;
    std::string query;
    std::size_t topk = 10;
    bool filtered = false;
    std::string gold;
    // config-file keys left over for PipelineConfig
    KeyValues file_config;
};

bool to_flag(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw UsageError("config key '" + key + "' expects true or false");
}

struct FileOption {
    const char* key;
    const char* flag;
    void (*set)(Options&, const std::string& key, const std::string& value);
};

// config-file spellings of flags that are not part of PipelineConfig
constexpr FileOption kFileOptions[] = {
    {"out", "--out", [](Options& o, const std::string&, const std::string& v) { o.out = v; }},
    {"data_dir", "--data-dir", [](Options& o, const std::string&, const std::string& v) { o.data_dir = v; }},
    {"train", "--train", [](Options& o, const std::string&, const std::string& v) { o.train = v; }},
    {"valid", "--valid", [](Options& o, const std::string&, const std::string& v) { o.valid = v; }},
    {"test", "--test", [](Options& o, const std::string&, const std::string& v) { o.test = v; }},
    {"numeric", "--numeric", [](Options& o, const std::string&, const std::string& v) { o.numeric = v; }},
    {"rules", "--rules", [](Options& o, const std::string&, const std::string& v) { o.rules_file = v; }},
    {"numeric_spec", "--numeric-spec",
     [](Options& o, const std::string&, const std::string& v) { o.numeric_spec_file = v; }},
    {"f32", "--f32", [](Options& o, const std::string& k, const std::string& v) { o.f32 = to_flag(k, v); }},
    {"checkpoint", "--checkpoint", [](Options& o, const std::string&, const std::string& v) { o.checkpoint = v; }},
    {"split", "--split", [](Options& o, const std::string&, const std::string& v) { o.split = v; }},
    {"cardinality", "--cardinality",
     [](Options& o, const std::string& k, const std::string& v) { o.cardinality = to_flag(k, v); }},
    {"query", "--query", [](Options& o, const std::string&, const std::string& v) { o.query = v; }},
    {"topk", "--topk",
     [](Options& o, const std::string& k, const std::string& v) {
         long long n = -1;
         try {
             n = parse_int(v);
         } catch (const std::exception&) {
         }
         if (n < 0) throw UsageError("config key '" + k + "' expects a count");
         o.topk = static_cast<std::size_t>(n);
     }},
    {"filtered", "--filtered",
     [](Options& o, const std::string& k, const std::string& v) { o.filtered = to_flag(k, v); }},
    {"gold", "--gold", [](Options& o, const std::string&, const std::string& v) { o.gold = v; }},
};

// Flags given on the command line win over the file. Keys for flags this subcommand lacks are ignored
// so one file can serve every subcommand.
void merge_config_file(Options& o, const CLI::App& sub) {
    if (!o.config_file) return;
    o.file_config = parse_key_values(read_file(*o.config_file), *o.config_file);
    for (const auto& fo : kFileOptions) {
        auto it = o.file_config.find(fo.key);
        if (it == o.file_config.end()) continue;
        const CLI::Option* opt = sub.get_option_no_throw(fo.flag);
        if (opt && opt->count() == 0) fo.set(o, it->first, it->second);
        o.file_config.erase(it);
    }
}

PipelineConfig effective_config(const Options& o) {
    PipelineConfig c;
    kblrn::apply(c, o.file_config);
    auto& t = c.train;
    if (o.seed) t.seed = *o.seed;
    if (o.deterministic) t.deterministic = true;
    if (o.ablation) t.ablation = Experts::parse(*o.ablation);
    if (o.numeric_transform) t.numeric_transform = parse_numeric_transform(*o.numeric_transform);
    if (o.learning_rate) t.learning_rate = *o.learning_rate;
    if (o.batch_size) t.batch_size = *o.batch_size;
    if (o.negatives) t.num_negatives = *o.negatives;
    if (o.epochs) t.epochs = *o.epochs;
    if (o.validate_every) t.validate_every = *o.validate_every;
    if (o.dim) t.embedding_dim = *o.dim;
    auto& f = c.features;
    if (o.min_head_coverage) f.min_head_coverage = *o.min_head_coverage;
    if (o.min_head_support) f.min_head_support = *o.min_head_support;
    if (o.tau) f.tau = *o.tau;
    if (o.sigma_floor) f.sigma_floor = *o.sigma_floor;
    if (o.threads) c.threads = *o.threads;
    if (c.threads == 0) c.threads = default_threads();
    t.validate();
    f.validate();
    return c;
}

struct Data {
    TripleStore store;
    LoadReport report;
    NumericTable table;
    NumericLoadReport numeric_report;
    bool has_numeric = false;
};

Data load_data(const Options& o) {
    fs::path train, valid, test;
    if (o.data_dir) {
        train = fs::path(*o.data_dir) / "train.txt";
        valid = fs::path(*o.data_dir) / "valid.txt";
        test = fs::path(*o.data_dir) / "test.txt";
    }
    if (o.train) train = *o.train;
    if (o.valid) valid = *o.valid;
    if (o.test) test = *o.test;
    if (train.empty()) throw UsageError("no training triples given (use --data-dir or --train)");
    Data d;
    d.store = TripleStore::load(train, valid, test, &d.report);
    if (o.numeric) {
        d.table = NumericTable::load(*o.numeric, d.store.entities(), &d.numeric_report);
        d.has_numeric = true;
    } else {
        d.table = NumericTable(d.store.num_entities(), {}, Matrix(static_cast<Eigen::Index>(d.store.num_entities()), 0));
    }
    return d;
}

RuleSet rules_for(const Options& o, const PipelineConfig& c, const TripleStore& store) {
    if (o.rules_file) return load_rules(*o.rules_file, store.relations());
    return mine_rules(store, {c.features.min_head_coverage, c.features.min_head_support, c.threads});
}

RelationNumericSpec numeric_spec_for(const Options& o, const PipelineConfig& c, const Data& d) {
    if (o.numeric_spec_file)
        return parse_numeric_spec(read_file(*o.numeric_spec_file), d.store.relations(), d.table.features(),
                                  *o.numeric_spec_file);
    return build_numeric_spec(d.store, d.table, {c.features.tau, c.features.sigma_floor, c.threads});
}

void echo_config(std::ostream& err, const PipelineConfig& c) {
    err << "# effective configuration\n";
    for_each_line(format(c), [&](std::string_view line, std::size_t) { err << "#   " << line << "\n"; });
}

fs::path out_dir(const Options& o) {
    fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
    echo_config(err, effective_config(o));
    Data d = load_data(o);
    const fs::path dir = out_dir(o);
    write_file(dir / "entities.tsv", d.store.vocabulary_dump_entities());
    write_file(dir / "relations.tsv", d.store.vocabulary_dump_relations());
    std::string report = d.report.to_string();
    if (d.has_numeric) {
        report += "numeric_rows\t" + std::to_string(d.numeric_report.rows) + "\n";
        report += "numeric_features\t" + std::to_string(d.table.num_features()) + "\n";
        report += "numeric_covered_entities\t" + std::to_string(d.table.covered_entities()) + "\n";
        report += "numeric_duplicates\t" + std::to_string(d.numeric_report.duplicates) + "\n";
        report += "numeric_unknown_entities\t" + std::to_string(d.numeric_report.unknown_entities.size()) + "\n";
    }
    write_file(dir / "ingest_report.txt", report);
    out << report;
    return kExitOk;
}

int cmd_mine(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    echo_config(err, c);
    Data d = load_data(o);
    const RuleSet rules = mine_rules(d.store, {c.features.min_head_coverage, c.features.min_head_support, c.threads});
    save_rules(rules, d.store.relations(), out_dir(o) / "rules.tsv");
    out << "relational_features\t" << rules.total() << "\n";
    return kExitOk;
}

int cmd_fit_numeric(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    echo_config(err, c);
    if (!o.numeric) throw UsageError("fit-numeric needs --numeric");
    Data d = load_data(o);
    const auto spec = build_numeric_spec(d.store, d.table, {c.features.tau, c.features.sigma_floor, c.threads});
    write_file(out_dir(o) / "numeric_spec.tsv", format_numeric_spec(spec, d.store.relations(), d.table.features()));
    out << "relations_with_numeric_features\t" << spec.relations_with_features() << "\n";
    return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    echo_config(err, c);
    Data d = load_data(o);
    const fs::path dir = out_dir(o);
    const RuleSet rules = rules_for(o, c, d.store);
    const RelationNumericSpec spec = numeric_spec_for(o, c, d);
    save_rules(rules, d.store.relations(), dir / "rules.tsv");
    write_file(dir / "numeric_spec.tsv", format_numeric_spec(spec, d.store.relations(), d.table.features()));
    write_file(dir / "config.txt", format(c));

    const FeatureExtractor features(d.store, rules, d.table, spec);
    TrainResult result = train(features, c.train, c.threads, [&](const std::string& line) { err << line << "\n"; });
    write_file(dir / "train.log", result.log.to_text());

    Checkpoint ck;
    ck.entities = d.store.entities();
    ck.relations = d.store.relations();
    ck.features = d.table.features();
    ck.config = c.train;
    ck.rules = rules;
    ck.model = std::move(result.model);
    ck.adam = std::move(result.adam);
    save_checkpoint(ck, dir / "model.ckpt", o.f32);
    out << "best_epoch\t" << result.best_epoch << "\n";
    if (result.best_mrr) out << "best_validation_mrr\t" << format_double(*result.best_mrr) << "\n";
    return kExitOk;
}

struct Loaded {
    Data data;
    Checkpoint ck;
};

Loaded load_for_inference(const Options& o) {
    if (o.checkpoint.empty()) throw UsageError("--checkpoint is required");
    Loaded l{load_data(o), load_checkpoint(o.checkpoint, o.dim)};
    if (!(l.ck.entities == l.data.store.entities()) || !(l.ck.relations == l.data.store.relations()))
        throw DataError("checkpoint vocabulary does not match the supplied triple files");
    if (l.ck.features.size() > 0 && !(l.ck.features == l.data.table.features()))
        throw DataError("checkpoint numeric features do not match the supplied numeric file (pass --numeric)");
    return l;
}

QueryDirection parse_query(const std::string& text, const TripleStore& store, EntityId& fixed, RelationId& r) {
    std::vector<std::string_view> cols = split(text, '\t');
    std::string unescaped;
    if (cols.size() != 3) {
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == 't') {
                unescaped += '\t';
                ++i;
            } else {
                unescaped += text[i];
            }
        }
        cols = split(unescaped, '\t');
    }
    if (cols.size() != 3) throw UsageError("query must be 'head<TAB>relation<TAB>?' or '?<TAB>relation<TAB>tail'");
    auto rel = store.relations().find(cols[1]);
    if (!rel) throw DataError("unknown relation '" + std::string(cols[1]) + "'");
    r = *rel;
    const bool tail_query = cols[2] == "?";
    if (tail_query == (cols[0] == "?")) throw UsageError("exactly one side of the query must be '?'");
    const auto label = tail_query ? cols[0] : cols[2];
    auto e = store.entities().find(label);
    if (!e) throw DataError("unknown entity '" + std::string(label) + "'");
    fixed = *e;
    return tail_query ? QueryDirection::Tail : QueryDirection::Head;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
    const auto c = effective_config(o);
    echo_config(err, c);
    Loaded l = load_for_inference(o);
    Split split;
    if (o.split == "test") split = Split::Test;
    else if (o.split == "valid") split = Split::Valid;
    else if (o.split == "train") split = Split::Train;
    else throw UsageError("--split must be train, valid or test");
    const FeatureExtractor features(l.data.store, l.ck.rules, l.data.table, l.ck.model.numeric);
    const auto queries = queries_for(l.data.store.triples(split));
    if (queries.empty()) throw DataError(std::string("split '") + split_name(split) + "' is empty");
    const std::string name = "KB" + l.ck.model.options.experts.name();
    const Metrics all = evaluate(l.ck.model, features, queries, c.threads);
    std::string report = all.to_table(name + " " + split_name(split) + " (filtered)");
    std::string kv = "model=" + name + "\nsplit=" + split_name(split) + "\n" + all.to_key_values();
    if (o.cardinality) {
        const auto buckets = split_by_cardinality(l.data.store, queries);
        const Metrics one = evaluate(l.ck.model, features, buckets.one, c.threads);
        const Metrics many = evaluate(l.ck.model, features, buckets.many, c.threads);
        report += one.to_table("One");
        report += many.to_table("Many");
        kv += one.to_key_values("one.") + many.to_key_values("many.");
    }
    const std::string text = report + "\n" + kv;
    write_file(out_dir(o) / "metrics.txt", text);
    out << text;
    return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
    echo_config(err, effective_config(o));
    Loaded l = load_for_inference(o);
    EntityId fixed;
    RelationId r;
    const auto dir = parse_query(o.query, l.data.store, fixed, r);
    const FeatureExtractor features(l.data.store, l.ck.rules, l.data.table, l.ck.model.numeric);
    const auto preds = predict(l.ck.model, features, dir, fixed, r, o.topk, o.filtered);
    for (std::size_t i = 0; i < preds.size(); ++i)
        out << i + 1 << "\t" << l.data.store.entities().label(preds[i].entity) << "\t" << format_double(preds[i].logit)
            << "\n";
    return kExitOk;
}

int cmd_prauc(const Options& o, std::ostream& out, std::ostream& err) {
    echo_config(err, effective_config(o));
    if (o.gold.empty()) throw UsageError("--gold is required");
    Loaded l = load_for_inference(o);
    EntityId fixed;
    RelationId r;
    const auto dir = parse_query(o.query, l.data.store, fixed, r);
    std::vector<std::string> unknown;
    const auto labels = parse_gold_labels(read_file(o.gold), l.data.store.entities(), &unknown, o.gold);
    if (!unknown.empty()) err << "skipped " << unknown.size() << " gold entities not in the KB vocabulary\n";
    const FeatureExtractor features(l.data.store, l.ck.rules, l.data.table, l.ck.model.numeric);
    const double auc = pr_auc(l.ck.model, features, CompletionQuery{dir, fixed, r, EntityId{}}, labels);
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    const std::string text = "positives=" + std::to_string(positives) + "\nskipped_gold=" +
                             std::to_string(unknown.size()) + "\npr_auc=" + format_double(auc) + "\n";
    write_file(out_dir(o) / "metrics.txt", text);
    out << text;
    return kExitOk;
}

void add_shared(CLI::App* app, Options& o) {
    app->add_option("--config", o.config_file, "key=value configuration file");
    app->add_option("--seed", o.seed, "random seed");
    app->add_flag("--deterministic", o.deterministic, "reproducible execution");
    app->add_option("--ablation", o.ablation, "experts to enable: l, r, n, lr, ln, rn, lrn");
    app->add_option("--numeric-transform", o.numeric_transform, "rbf or sign");
    app->add_option("--threads", o.threads, "worker threads (default: hardware parallelism)");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--data-dir", o.data_dir, "directory with train.txt, valid.txt, test.txt");
    app->add_option("--train", o.train, "training triples (TSV)");
    app->add_option("--valid", o.valid, "validation triples (TSV)");
    app->add_option("--test", o.test, "test triples (TSV)");
    app->add_option("--numeric", o.numeric, "numeric attributes: entity<TAB>feature<TAB>value");
    app->add_option("--min-head-coverage", o.min_head_coverage, "rule mining head-coverage threshold");
    app->add_option("--min-head-support", o.min_head_support, "minimum training triples per head relation");
    app->add_option("--tau", o.tau, "numeric feature coverage threshold");
    app->add_option("--sigma-floor", o.sigma_floor, "lower bound on RBF widths");
}

void add_training(CLI::App* app, Options& o) {
    app->add_option("--rules", o.rules_file, "use this rule file instead of mining");
    app->add_option("--numeric-spec", o.numeric_spec_file, "use this fitted numeric spec instead of fitting");
    app->add_option("--learning-rate", o.learning_rate, "Adam step size");
    app->add_option("--batch-size", o.batch_size, "positive triples per update");
    app->add_option("--negatives", o.negatives, "negative samples per side");
    app->add_option("--epochs", o.epochs, "maximum training epochs");
    app->add_option("--validate-every", o.validate_every, "epochs between validation passes");
    app->add_option("--dim", o.dim, "embedding size");
    app->add_flag("--f32", o.f32, "store checkpoint tensors as 32-bit floats");
}

void add_inference(CLI::App* app, Options& o) {
    app->add_option("--checkpoint", o.checkpoint, "model.ckpt written by train");
    app->add_option("--dim", o.dim, "expected embedding size");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Knowledge base completion with latent, relational and numerical experts", "kblrn"};
    app.require_subcommand(1);
    Options o;

    auto* ingest = app.add_subcommand("ingest", "load and validate triples, dump vocabularies");
    add_shared(ingest, o);
    auto* mine = app.add_subcommand("mine-rules", "mine length-1/2 path rules");
    add_shared(mine, o);
    auto* fit = app.add_subcommand("fit-numeric", "select numeric features and fit RBF parameters");
    add_shared(fit, o);
    auto* trn = app.add_subcommand("train", "train a model");
    add_shared(trn, o);
    add_training(trn, o);
    auto* evl = app.add_subcommand("eval", "filtered ranking evaluation");
    add_shared(evl, o);
    add_inference(evl, o);
    evl->add_option("--split", o.split, "train, valid or test");
    evl->add_flag("--cardinality", o.cardinality, "also report One/Many query buckets");
    auto* pred = app.add_subcommand("predict", "top-k completions for a query");
    add_shared(pred, o);
    add_inference(pred, o);
    pred->add_option("--query", o.query, "'head<TAB>relation<TAB>?' or '?<TAB>relation<TAB>tail'");
    pred->add_option("--topk", o.topk, "number of completions to print");
    pred->add_flag("--filtered", o.filtered, "drop completions already in the KB");
    auto* prauc = app.add_subcommand("prauc", "PR-AUC of one query against a complete ground truth");
    add_shared(prauc, o);
    add_inference(prauc, o);
    prauc->add_option("--query", o.query, "'head<TAB>relation<TAB>?' or '?<TAB>relation<TAB>tail'");
    prauc->add_option("--gold", o.gold, "entity<TAB>{1|0} ground truth");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (const CLI::App* sub : app.get_subcommands()) merge_config_file(o, *sub);
        auto require = [](const std::string& value, const char* flag) {
            if (value.empty()) throw UsageError(std::string(flag) + " is required");
        };
        if (*evl || *pred || *prauc) require(o.checkpoint, "--checkpoint");
        if (*pred || *prauc) require(o.query, "--query");
        if (*prauc) require(o.gold, "--gold");
        if (*ingest) return cmd_ingest(o, out, err);
        if (*mine) return cmd_mine(o, out, err);
        if (*fit) return cmd_fit_numeric(o, out, err);
        if (*trn) return cmd_train(o, out, err);
        if (*evl) return cmd_eval(o, out, err);
        if (*pred) return cmd_predict(o, out, err);
        if (*prauc) return cmd_prauc(o, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace kblrn::cli
