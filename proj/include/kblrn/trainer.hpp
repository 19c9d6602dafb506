#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kblrn/config.hpp"
#include "kblrn/features.hpp"
#include "kblrn/optimizer.hpp"
#include "kblrn/poe_model.hpp"

namespace kblrn {

struct NegativeSets {
    std::vector<Triple> tail_set;  // positive first, then N corrupted tails
    std::vector<Triple> head_set;  // positive first, then N corrupted heads
};

// Uniform corruption with replacement; accidental positives are kept.
NegativeSets sample_negatives(std::size_t num_entities, const Triple& positive, std::size_t n, std::mt19937_64& rng);

// Stops on the first validation score below the best seen so far.
class EarlyStopping {
   public:
    // Returns true when training should stop.
    bool observe(double score);
    bool last_improved() const { return last_improved_; }
    std::optional<double> best() const { return best_; }

   private:
    std::optional<double> best_;
    bool last_improved_ = false;
};

struct TrainLog {
    struct EpochLoss {
        std::size_t epoch;
        double loss;
    };
    struct Validation {
        std::size_t epoch;
        double mrr;
    };
    std::vector<EpochLoss> losses;
    std::vector<Validation> validations;

    // `epoch<TAB>loss` and `validation<TAB>epoch<TAB>MRR`, in the order they happened.
    std::string to_text() const;

   private:
    friend struct Trainer;
    std::vector<std::string> lines_;
};

struct TrainResult {
    PoeModel model;  // best validated model, or the last one if validation never ran
    AdamState adam;
    TrainLog log;
    std::optional<double> best_mrr;
    std::size_t best_epoch = 0;
    bool stopped_early = false;
};

using ProgressFn = std::function<void(const std::string&)>;

// Builds the two cross-entropy candidate sets (tail- and head-corrupted) of one positive.
std::pair<CandidateSet, CandidateSet> build_candidate_sets(const FeatureExtractor& features, const NegativeSets& sets);

TrainResult train(const FeatureExtractor& features, const TrainConfig& config, unsigned threads = 1,
                  const ProgressFn& progress = {});

// Same loop, starting from an existing model and optimizer state.
TrainResult train_from(const FeatureExtractor& features, const TrainConfig& config, PoeModel model, AdamState adam,
                       unsigned threads = 1, const ProgressFn& progress = {});

}  // namespace kblrn
