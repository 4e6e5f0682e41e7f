#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rollcall/corpus/splits.hpp"
#include "rollcall/corpus/types.hpp"
#include "rollcall/model/config.hpp"

namespace rollcall::eval {

struct EvalResult {
    std::string model;
    std::string setting;  // "in_session" or "out_of_session"
    std::string split;    // "cv<k>" or the test block's session labels
    std::size_t votes = 0;
    double accuracy = 0.0;
};

// Threshold 0.5, ties predicted yes.
double accuracy(const std::vector<double>& probs, const std::vector<double>& labels);
// Fraction of yes labels = accuracy of the constant-yes predictor.
double guess_yes(const std::vector<double>& labels);

std::vector<double> labels_of(const std::vector<corpus::VoteRecord>& votes);

// k-fold cross-validation stratified by session. Each fold trains a fresh
// model on the other folds' bills, with the vocabulary rebuilt from that
// fold's training partition so test tokens never enter the index space.
// The aggregate is vote-weighted: total correct over total votes.
EvalResult run_in_session_cv(const corpus::Corpus& corpus, const model::ModelConfig& config,
                             std::size_t k, std::uint64_t fold_seed);

// One training run on the train sessions, then one result per test block.
// Test votes by legislators absent from training are dropped by the split;
// an empty block after filtering is an error.
std::vector<EvalResult> run_out_of_session(const corpus::Corpus& corpus,
                                           const model::ModelConfig& config,
                                           const std::set<std::string>& train_sessions,
                                           const std::vector<std::set<std::string>>& test_blocks);

// Guess-yes rows under the same two protocols.
EvalResult guess_yes_in_session(const corpus::Corpus& corpus, std::size_t k);
std::vector<EvalResult> guess_yes_out_of_session(
    const corpus::Corpus& corpus, const std::set<std::string>& train_sessions,
    const std::vector<std::set<std::string>>& test_blocks);

std::string block_label(const std::set<std::string>& sessions);

// Derives a variant configuration from shared hyperparameters. `name` is one
// of mwe, cnn, mwe_meta, cnn_meta, meta_only, or a text variant with an _ft
// suffix; only the encoder/metadata/text fields change.
model::ModelConfig variant_config(const model::ModelConfig& base, const std::string& name);

}  // namespace rollcall::eval
