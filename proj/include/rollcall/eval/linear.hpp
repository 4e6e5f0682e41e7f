#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rollcall/corpus/corpus.hpp"
#include "rollcall/corpus/vocab.hpp"
#include "rollcall/eval/harness.hpp"
#include "rollcall/model/config.hpp"
#include "rollcall/model/model.hpp"
#include "rollcall/nd/optim.hpp"

namespace rollcall::eval {

// Logistic-regression baseline over sparse features: binary bag-of-words
// presence, a legislator one-hot, the two sponsor fractions, and a bias.
// Trained with the same optimizer and schedule as the neural models.
class LinearModel {
public:
    // Parameter names: "w.vocab" [V], "w.leg" [L], "w.meta" [2], "b" [1].
    static LinearModel init(std::size_t vocab_size, std::size_t num_legislators);

    double predict(const model::EncodedBill& bill, std::size_t leg_row) const;

    // Accumulates gradients of loss_scale * BCE into `grads`; returns the loss.
    double forward_backward(const model::EncodedBill& bill, std::size_t leg_row, double label,
                            double loss_scale, nd::TensorMap& grads) const;

    nd::ParamStore& params() { return params_; }
    const nd::ParamStore& params() const { return params_; }

private:
    LinearModel() = default;

    double logit(const model::EncodedBill& bill, std::size_t leg_row) const;

    nd::ParamStore params_;
};

// Trains for config.epochs with config.batch_size and config.seed-derived
// shuffling; only the schedule fields of `config` are used.
void train_linear(LinearModel& model, const model::Dataset& data, const model::ModelConfig& config);

EvalResult run_in_session_cv_linear(const corpus::Corpus& corpus, const model::ModelConfig& config,
                                    std::size_t k, std::uint64_t fold_seed);

std::vector<EvalResult> run_out_of_session_linear(const corpus::Corpus& corpus,
                                                  const model::ModelConfig& config,
                                                  const std::set<std::string>& train_sessions,
                                                  const std::vector<std::set<std::string>>& test_blocks);

}  // namespace rollcall::eval
