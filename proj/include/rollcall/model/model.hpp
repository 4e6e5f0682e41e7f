#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rollcall/corpus/types.hpp"
#include "rollcall/corpus/vocab.hpp"
#include "rollcall/model/config.hpp"
#include "rollcall/nd/ops.hpp"
#include "rollcall/nd/optim.hpp"
#include "rollcall/nd/rng.hpp"

namespace rollcall::model {

// A bill as the model consumes it: the chosen text channel already mapped to
// vocabulary indices, plus the sponsor fractions.
struct EncodedBill {
    std::string bill_id;
    std::vector<std::uint32_t> tokens;
    double p_r = 0.0;
    double p_d = 0.0;
};

struct Example {
    std::size_t bill = 0;  // index into Dataset::bills
    std::size_t leg_row = 0;
    double label = 0.0;  // yes=1, no=0
};

struct Dataset {
    std::vector<EncodedBill> bills;
    std::vector<Example> examples;
};

// Encodes the votes' bills under `vocab` and the config's text source.
// With text=dummy every bill carries the same seed-fixed token sequence.
// Example order follows the order of `votes`.
Dataset make_dataset(const corpus::Corpus& corpus, const std::vector<corpus::VoteRecord>& votes,
                     const corpus::Vocab& vocab, const ModelConfig& config);

// v_BL = W_B v_B + b_B; logit = W_v (v_BL (.) v_L) + b_v; p = sigmoid(logit).
// v_B comes from the configured encoder, optionally mixed by sponsor party.
class VoteModel {
public:
    // Parameter names, canonical across the project:
    //   emb | emb.rep/emb.dem      embedding tables (row 0 masked to zero)
    //   conv.w/conv.b | conv.rep.w/conv.rep.b/conv.dem.w/conv.dem.b
    //   mix.rep/mix.dem            sponsor gates a_r, a_d (init ones)
    //   proj.w/proj.b              W_B, b_B
    //   leg.emb                    V_L, one row per legislator
    //   score.w/score.b            W_v, b_v
    // Party copies start as exact copies of one drawn initialization.
    static VoteModel init(const ModelConfig& config, const corpus::Vocab& vocab,
                          std::size_t num_legislators);

    double predict(const EncodedBill& bill, std::size_t leg_row) const;

    // Adds d(loss_scale * bce) / d(theta) into `grads`; returns prob + loss.
    nd::BceResult forward_backward(const EncodedBill& bill, std::size_t leg_row, double label,
                                   double loss_scale, nd::TensorMap& grads) const;

    const ModelConfig& config() const { return config_; }
    nd::ParamStore& params() { return params_; }
    const nd::ParamStore& params() const { return params_; }
    std::size_t num_legislators() const { return num_legislators_; }
    std::size_t vocab_size() const { return vocab_size_; }

    // Rebuilds a model around checkpointed tensors.
    static VoteModel from_params(const ModelConfig& config, nd::ParamStore params,
                                 std::size_t vocab_size, std::size_t num_legislators);

private:
    VoteModel() = default;
    nd::Tensor bill_repr(const EncodedBill& bill, enc::EncodeCache& cache_r,
                         enc::EncodeCache& cache_d) const;

    ModelConfig config_;
    nd::ParamStore params_;
    std::size_t num_legislators_ = 0;
    std::size_t vocab_size_ = 0;
};

}  // namespace rollcall::model
