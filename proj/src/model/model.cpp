#include "rollcall/model/model.hpp"

#include <map>
#include <stdexcept>

#include "rollcall/enc/encoder.hpp"

namespace rollcall::model {

namespace {

// Stream id for deriving the dummy-text seed from the model seed.
constexpr std::uint64_t kDummyStream = 0x64756d6d79ULL;

nd::Tensor row_mask_table(std::size_t rows, std::size_t cols) {
    nd::Tensor mask = nd::Tensor::full({rows, cols}, 1.0);
    for (std::size_t c = 0; c < cols; ++c) mask.at(0, c) = 0.0;
    return mask;
}

}  // namespace

Dataset make_dataset(const corpus::Corpus& corpus, const std::vector<corpus::VoteRecord>& votes,
                     const corpus::Vocab& vocab, const ModelConfig& config) {
    Dataset data;
    std::vector<std::uint32_t> dummy;
    if (config.text == TextSource::dummy)
        dummy = enc::dummy_tokens(config.dummy_length, vocab.size(),
                                  nd::Rng(config.seed).derive(kDummyStream).seed());

    std::map<std::string, std::size_t> bill_index;
    for (const auto& v : votes) {
        auto [it, fresh] = bill_index.try_emplace(v.bill_id, data.bills.size());
        if (fresh) {
            const auto& b = corpus.bills.at(v.bill_id);
            EncodedBill eb;
            eb.bill_id = b.bill_id;
            eb.p_r = b.p_r;
            eb.p_d = b.p_d;
            switch (config.text) {
                case TextSource::summary:
                    eb.tokens = vocab.lookup_all(b.summary_tokens);
                    break;
                case TextSource::fulltext:
                    if (b.fulltext_tokens.empty())
                        throw std::runtime_error("bill " + b.bill_id +
                                                 " has no full text but text=fulltext");
                    eb.tokens = vocab.lookup_all(b.fulltext_tokens);
                    break;
                case TextSource::dummy:
                    eb.tokens = dummy;
                    break;
            }
            data.bills.push_back(std::move(eb));
        }
        Example ex;
        ex.bill = it->second;
        ex.leg_row = corpus.legislators.at(v.legislator_id).row_index;
        ex.label = v.outcome ? 1.0 : 0.0;
        data.examples.push_back(ex);
    }
    return data;
}

VoteModel VoteModel::init(const ModelConfig& config, const corpus::Vocab& vocab,
                          std::size_t num_legislators) {
    config.validate();
    if (num_legislators == 0) throw std::runtime_error("model needs at least one legislator");

    VoteModel m;
    m.config_ = config;
    m.num_legislators_ = num_legislators;
    m.vocab_size_ = vocab.size();
    nd::Rng rng(config.seed);

    // Draw order is fixed: embeddings, filters, projection head. Party
    // copies duplicate one draw so both start from the same vectors.
    nd::Rng emb_rng = rng.derive(1);
    nd::Tensor table = config.pretrained_path.empty()
                           ? enc::init_embeddings(vocab.size(), emb_rng)
                           : enc::load_pretrained(config.pretrained_path, vocab, emb_rng);
    const nd::Tensor mask = row_mask_table(vocab.size(), enc::kWordDim);

    const bool party_copies = config.metadata && !config.shared_text_params;
    if (party_copies) {
        m.params_.add_masked("emb.rep", table, mask);
        m.params_.add_masked("emb.dem", std::move(table), mask);
    } else {
        m.params_.add_masked("emb", std::move(table), mask);
    }

    if (config.encoder == enc::EncoderKind::cnn) {
        nd::Rng conv_rng = rng.derive(2);
        const std::size_t fan_in = config.window * enc::kWordDim;
        nd::Tensor filters =
            nd::glorot_uniform(fan_in, config.filters, {config.filters, fan_in}, conv_rng);
        if (party_copies) {
            m.params_.add("conv.rep.w", filters);
            m.params_.add("conv.rep.b", nd::Tensor({config.filters}));
            m.params_.add("conv.dem.w", std::move(filters));
            m.params_.add("conv.dem.b", nd::Tensor({config.filters}));
        } else {
            m.params_.add("conv.w", std::move(filters));
            m.params_.add("conv.b", nd::Tensor({config.filters}));
        }
    }

    if (config.metadata) {
        m.params_.add("mix.rep", nd::Tensor::full({config.d_text()}, 1.0));
        m.params_.add("mix.dem", nd::Tensor::full({config.d_text()}, 1.0));
    }

    nd::Rng head_rng = rng.derive(3);
    m.params_.add("proj.w", nd::glorot_uniform(config.d_text(), config.leg_dim,
                                               {config.leg_dim, config.d_text()}, head_rng));
    m.params_.add("proj.b", nd::Tensor({config.leg_dim}));
    m.params_.add("leg.emb", nd::glorot_uniform(config.leg_dim, config.leg_dim,
                                                {num_legislators, config.leg_dim}, head_rng));
    m.params_.add("score.w", nd::glorot_uniform(config.leg_dim, 1, {config.leg_dim}, head_rng));
    m.params_.add("score.b", nd::Tensor({1}));
    return m;
}

VoteModel VoteModel::from_params(const ModelConfig& config, nd::ParamStore params,
                                 std::size_t vocab_size, std::size_t num_legislators) {
    config.validate();
    VoteModel m;
    m.config_ = config;
    m.num_legislators_ = num_legislators;
    m.vocab_size_ = vocab_size;
    // Checkpoints carry tensors only; the padding-row masks are structural
    // and re-derived here.
    const nd::Tensor mask = row_mask_table(vocab_size, enc::kWordDim);
    for (auto& [name, t] : params.tensors()) {
        if (name == "emb" || name == "emb.rep" || name == "emb.dem")
            m.params_.add_masked(name, std::move(t), mask);
        else
            m.params_.add(name, std::move(t));
    }
    return m;
}

nd::Tensor VoteModel::bill_repr(const EncodedBill& bill, enc::EncodeCache& cache_r,
                                enc::EncodeCache& cache_d) const {
    const auto kind = config_.encoder;
    const std::size_t w = config_.window;
    const bool cnn = kind == enc::EncoderKind::cnn;
    if (!config_.metadata) {
        return enc::encode_text(kind, bill.tokens, params_.at("emb"),
                                cnn ? &params_.at("conv.w") : nullptr,
                                cnn ? &params_.at("conv.b") : nullptr, w, cache_r);
    }
    const bool shared = config_.shared_text_params;
    nd::Tensor t_r = enc::encode_text(
        kind, bill.tokens, shared ? params_.at("emb") : params_.at("emb.rep"),
        cnn ? &params_.at(shared ? "conv.w" : "conv.rep.w") : nullptr,
        cnn ? &params_.at(shared ? "conv.b" : "conv.rep.b") : nullptr, w, cache_r);
    nd::Tensor t_d = enc::encode_text(
        kind, bill.tokens, shared ? params_.at("emb") : params_.at("emb.dem"),
        cnn ? &params_.at(shared ? "conv.w" : "conv.dem.w") : nullptr,
        cnn ? &params_.at(shared ? "conv.b" : "conv.dem.b") : nullptr, w, cache_d);
    return enc::mix_sponsor(t_r, t_d, params_.at("mix.rep"), params_.at("mix.dem"), bill.p_r,
                            bill.p_d);
}

double VoteModel::predict(const EncodedBill& bill, std::size_t leg_row) const {
    if (leg_row >= num_legislators_)
        throw std::runtime_error("legislator row " + std::to_string(leg_row) + " out of range");
    enc::EncodeCache cr, cd;
    const nd::Tensor v_b = bill_repr(bill, cr, cd);
    const nd::Tensor v_bl = nd::affine(params_.at("proj.w"), v_b, params_.at("proj.b"));

    const auto& legs = params_.at("leg.emb");
    nd::Tensor v_l({config_.leg_dim});
    for (std::size_t i = 0; i < config_.leg_dim; ++i) v_l[i] = legs.at(leg_row, i);

    const double logit =
        nd::dot(params_.at("score.w"), nd::elementwise_mul(v_bl, v_l)) + params_.at("score.b")[0];
    return nd::sigmoid(logit);
}

nd::BceResult VoteModel::forward_backward(const EncodedBill& bill, std::size_t leg_row,
                                          double label, double loss_scale,
                                          nd::TensorMap& grads) const {
    if (leg_row >= num_legislators_)
        throw std::runtime_error("legislator row " + std::to_string(leg_row) + " out of range");
    const auto kind = config_.encoder;
    const bool cnn = kind == enc::EncoderKind::cnn;
    const std::size_t w = config_.window;

    enc::EncodeCache cr, cd;
    const nd::Tensor v_b = bill_repr(bill, cr, cd);
    const nd::Tensor v_bl = nd::affine(params_.at("proj.w"), v_b, params_.at("proj.b"));

    const auto& legs = params_.at("leg.emb");
    nd::Tensor v_l({config_.leg_dim});
    for (std::size_t i = 0; i < config_.leg_dim; ++i) v_l[i] = legs.at(leg_row, i);

    const nd::Tensor gated = nd::elementwise_mul(v_bl, v_l);
    const double logit = nd::dot(params_.at("score.w"), gated) + params_.at("score.b")[0];
    const nd::BceResult out = nd::sigmoid_bce(logit, label);

    const double dlogit = loss_scale * nd::sigmoid_bce_backward(logit, label);

    grads.at("score.b")[0] += dlogit;
    auto& g_score_w = grads.at("score.w");
    const auto& score_w = params_.at("score.w");
    nd::Tensor g_v_bl({config_.leg_dim});
    auto& g_legs = grads.at("leg.emb");
    for (std::size_t i = 0; i < config_.leg_dim; ++i) {
        g_score_w[i] += dlogit * gated[i];
        const double g_gated = dlogit * score_w[i];
        g_v_bl[i] = g_gated * v_l[i];
        g_legs.at(leg_row, i) += g_gated * v_bl[i];
    }

    nd::Tensor g_v_b({config_.d_text()});
    nd::affine_backward(params_.at("proj.w"), v_b, g_v_bl, grads.at("proj.w"), g_v_b,
                        grads.at("proj.b"));

    if (!config_.metadata) {
        enc::encode_text_backward(kind, cr, g_v_b, cnn ? &params_.at("conv.w") : nullptr, w,
                                  grads.at("emb"), cnn ? &grads.at("conv.w") : nullptr,
                                  cnn ? &grads.at("conv.b") : nullptr);
        return out;
    }

    const bool shared = config_.shared_text_params;
    const nd::Tensor t_r = (kind == enc::EncoderKind::mwe) ? nd::mean_pool(cr.rows) : cr.conv.pooled;
    const nd::Tensor t_d = (kind == enc::EncoderKind::mwe) ? nd::mean_pool(cd.rows) : cd.conv.pooled;

    nd::Tensor g_t_r({config_.d_text()}), g_t_d({config_.d_text()});
    enc::mix_sponsor_backward(t_r, t_d, params_.at("mix.rep"), params_.at("mix.dem"), bill.p_r,
                              bill.p_d, g_v_b, g_t_r, g_t_d, grads.at("mix.rep"),
                              grads.at("mix.dem"));

    enc::encode_text_backward(kind, cr, g_t_r,
                              cnn ? &params_.at(shared ? "conv.w" : "conv.rep.w") : nullptr, w,
                              grads.at(shared ? "emb" : "emb.rep"),
                              cnn ? &grads.at(shared ? "conv.w" : "conv.rep.w") : nullptr,
                              cnn ? &grads.at(shared ? "conv.b" : "conv.rep.b") : nullptr);
    enc::encode_text_backward(kind, cd, g_t_d,
                              cnn ? &params_.at(shared ? "conv.w" : "conv.dem.w") : nullptr, w,
                              grads.at(shared ? "emb" : "emb.dem"),
                              cnn ? &grads.at(shared ? "conv.w" : "conv.dem.w") : nullptr,
                              cnn ? &grads.at(shared ? "conv.b" : "conv.dem.b") : nullptr);
    return out;
}

}  // namespace rollcall::model
