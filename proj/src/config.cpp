#include "kblrn/config.hpp"

#include <stdexcept>

#include "kblrn/text_io.hpp"

namespace kblrn {

void TrainConfig::validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (num_negatives == 0) throw std::invalid_argument("num_negatives must be positive");
    if (validate_every == 0) throw std::invalid_argument("validate_every must be positive");
    if (embedding_dim <= 0) throw std::invalid_argument("embedding_dim must be positive");
}

void FeatureConfig::validate() const {
    if (!(min_head_coverage > 0 && min_head_coverage <= 1))
        throw std::invalid_argument("min_head_coverage must be in (0, 1]");
    if (min_head_support == 0) throw std::invalid_argument("min_head_support must be at least 1");
    if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("tau must be in (0, 1]");
    if (!(sigma_floor > 0)) throw std::invalid_argument("sigma_floor must be positive");
}

KeyValues parse_key_values(std::string_view text, const std::string& source) {
    KeyValues out;
    for_each_line(text, [&](std::string_view line, std::size_t number) {
        auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#') return;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, number, "expected key=value");
        auto trim = [](std::string_view s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string_view::npos ? std::string_view{} : s.substr(b, e - b + 1);
        };
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(source, number, "empty key");
        out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    });
    return out;
}

namespace {

std::size_t to_count(const std::string& key, const std::string& v) {
    try {
        const long long n = parse_int(v);
        if (n < 0) throw std::invalid_argument("");
        return static_cast<std::size_t>(n);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument(key + ": expected a non-negative integer, got '" + v + "'");
    }
}

double to_real(const std::string& key, const std::string& v) {
    try {
        return parse_double(v);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument(key + ": expected true/false, got '" + v + "'");
}

// Returns false if the key is not a train key.
bool apply_train_key(TrainConfig& c, const std::string& key, const std::string& v) {
    if (key == "learning_rate") c.learning_rate = to_real(key, v);
    else if (key == "batch_size") c.batch_size = to_count(key, v);
    else if (key == "num_negatives") c.num_negatives = to_count(key, v);
    else if (key == "epochs") c.epochs = to_count(key, v);
    else if (key == "validate_every") c.validate_every = to_count(key, v);
    else if (key == "embedding_dim") c.embedding_dim = static_cast<int>(to_count(key, v));
    else if (key == "ablation") c.ablation = Experts::parse(v);
    else if (key == "numeric_transform") c.numeric_transform = parse_numeric_transform(v);
    else if (key == "seed") c.seed = to_count(key, v);
    else if (key == "deterministic") c.deterministic = to_bool(key, v);
    else return false;
    return true;
}

}  // namespace

void apply(TrainConfig& config, const KeyValues& values) {
    for (const auto& [key, v] : values)
        if (!apply_train_key(config, key, v)) throw std::invalid_argument("unknown config key '" + key + "'");
}

void apply(PipelineConfig& config, const KeyValues& values) {
    for (const auto& [key, v] : values) {
        if (apply_train_key(config.train, key, v)) continue;
        auto& f = config.features;
        if (key == "min_head_coverage") f.min_head_coverage = to_real(key, v);
        else if (key == "min_head_support") f.min_head_support = to_count(key, v);
        else if (key == "tau") f.tau = to_real(key, v);
        else if (key == "sigma_floor") f.sigma_floor = to_real(key, v);
        else if (key == "threads") config.threads = static_cast<unsigned>(to_count(key, v));
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

std::string format(const TrainConfig& c) {
    std::string s;
    s += "learning_rate=" + format_double(c.learning_rate) + "\n";
    s += "batch_size=" + std::to_string(c.batch_size) + "\n";
    s += "num_negatives=" + std::to_string(c.num_negatives) + "\n";
    s += "epochs=" + std::to_string(c.epochs) + "\n";
    s += "validate_every=" + std::to_string(c.validate_every) + "\n";
    s += "embedding_dim=" + std::to_string(c.embedding_dim) + "\n";
    s += "ablation=" + c.ablation.name() + "\n";
    s += "numeric_transform=" + to_string(c.numeric_transform) + "\n";
    s += "seed=" + std::to_string(c.seed) + "\n";
    s += std::string("deterministic=") + (c.deterministic ? "true" : "false") + "\n";
    return s;
}

std::string format(const FeatureConfig& c) {
    std::string s;
    s += "min_head_coverage=" + format_double(c.min_head_coverage) + "\n";
    s += "min_head_support=" + std::to_string(c.min_head_support) + "\n";
    s += "tau=" + format_double(c.tau) + "\n";
    s += "sigma_floor=" + format_double(c.sigma_floor) + "\n";
    return s;
}

std::string format(const PipelineConfig& c) {
    return format(c.train) + format(c.features) + "threads=" + std::to_string(c.threads) + "\n";
}

}  // namespace kblrn
