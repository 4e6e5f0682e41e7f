#pragma once

#include <utility>
#include <vector>

#include "rollcall/model/model.hpp"

namespace rollcall::model {

struct EpochStats {
    double mean_loss = 0.0;
    double accuracy = 0.0;  // running, measured on pre-update predictions
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
};

// Mini-batch BCE training: each epoch shuffles the examples (seeded), splits
// them into batches of at most batch_size, averages the loss over the batch
// and takes one optimizer step. Deterministic given (params seed, train seed).
TrainHistory train_model(VoteModel& model, const Dataset& data);

// Mean loss and accuracy of the current parameters (threshold 0.5, ties yes).
std::pair<double, double> evaluate_model(const VoteModel& model, const Dataset& data);

}  // namespace rollcall::model
