#include "rollcall/eval/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rollcall/corpus/splits.hpp"
#include "rollcall/nd/ops.hpp"
#include "rollcall/nd/rng.hpp"

namespace rollcall::eval {

namespace {
constexpr std::uint64_t kShuffleStream = 0x73687566;

std::vector<std::uint32_t> distinct_tokens(const std::vector<std::uint32_t>& tokens) {
    std::vector<std::uint32_t> out(tokens.begin(), tokens.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}
}  // namespace

LinearModel LinearModel::init(std::size_t vocab_size, std::size_t num_legislators) {
    if (vocab_size == 0 || num_legislators == 0)
        throw std::runtime_error("linear model needs a nonempty vocabulary and legislator set");
    LinearModel m;
    m.params_.add("w.vocab", nd::Tensor::zeros({vocab_size}));
    m.params_.add("w.leg", nd::Tensor::zeros({num_legislators}));
    m.params_.add("w.meta", nd::Tensor::zeros({2}));
    m.params_.add("b", nd::Tensor::zeros({1}));
    return m;
}

double LinearModel::logit(const model::EncodedBill& bill, std::size_t leg_row) const {
    const auto& w_vocab = params_.at("w.vocab");
    const auto& w_leg = params_.at("w.leg");
    const auto& w_meta = params_.at("w.meta");
    if (leg_row >= w_leg.size())
        throw std::runtime_error("legislator row " + std::to_string(leg_row) + " out of range");
    double z = params_.at("b")[0] + w_leg[leg_row] + w_meta[0] * bill.p_r + w_meta[1] * bill.p_d;
    for (std::size_t tok : distinct_tokens(bill.tokens)) {
        if (tok >= w_vocab.size())
            throw std::runtime_error("token index " + std::to_string(tok) + " out of range");
        z += w_vocab[tok];
    }
    return z;
}

double LinearModel::predict(const model::EncodedBill& bill, std::size_t leg_row) const {
    return nd::sigmoid(logit(bill, leg_row));
}

double LinearModel::forward_backward(const model::EncodedBill& bill, std::size_t leg_row,
                                     double label, double loss_scale, nd::TensorMap& grads) const {
    const double z = logit(bill, leg_row);
    const auto res = nd::sigmoid_bce(z, label);
    const double d = loss_scale * nd::sigmoid_bce_backward(z, label);
    grads.at("b")[0] += d;
    grads.at("w.leg")[leg_row] += d;
    auto& g_meta = grads.at("w.meta");
    g_meta[0] += d * bill.p_r;
    g_meta[1] += d * bill.p_d;
    auto& g_vocab = grads.at("w.vocab");
    for (std::size_t tok : distinct_tokens(bill.tokens)) g_vocab[tok] += d;
    return res.loss;
}

void train_linear(LinearModel& model, const model::Dataset& data,
                  const model::ModelConfig& config) {
    if (data.examples.empty()) throw std::runtime_error("cannot train on an empty dataset");
    auto& params = model.params();
    auto state = nd::AdaMaxState::init(params);
    auto shuffle_rng = nd::Rng(config.seed).derive(kShuffleStream);

    std::vector<std::size_t> order(data.examples.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, order.size());
            const double scale = 1.0 / static_cast<double>(end - start);
            nd::TensorMap grads;
            for (const auto& [name, t] : params.tensors())
                grads.emplace(name, nd::Tensor::zeros(t.shape()));
            for (std::size_t i = start; i < end; ++i) {
                const auto& ex = data.examples[order[i]];
                const double loss = model.forward_backward(data.bills[ex.bill], ex.leg_row,
                                                           ex.label, scale, grads);
                if (!std::isfinite(loss))
                    throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                             ", batch starting at " + std::to_string(start));
            }
            nd::adamax_step(params, grads, state, config.optimizer);
        }
    }
}

namespace {

std::pair<std::size_t, std::size_t> train_and_score_linear(
    const corpus::Corpus& corpus, const model::ModelConfig& config,
    const std::vector<corpus::VoteRecord>& train_votes,
    const std::vector<corpus::VoteRecord>& test_votes) {
    std::set<std::string> train_bills;
    for (const auto& v : train_votes) train_bills.insert(v.bill_id);
    std::vector<const corpus::Bill*> bills;
    for (const auto& id : train_bills) bills.push_back(&corpus.bills.at(id));
    const auto vocab = corpus::Vocab::build(bills);

    auto m = LinearModel::init(vocab.size(), corpus.legislators.size());
    const auto train_data = model::make_dataset(corpus, train_votes, vocab, config);
    train_linear(m, train_data, config);

    const auto test_data = model::make_dataset(corpus, test_votes, vocab, config);
    std::size_t correct = 0;
    for (const auto& ex : test_data.examples) {
        const double p = m.predict(test_data.bills[ex.bill], ex.leg_row);
        correct += ((p >= 0.5) == (ex.label > 0.5)) ? 1 : 0;
    }
    return {correct, test_data.examples.size()};
}

}  // namespace

EvalResult run_in_session_cv_linear(const corpus::Corpus& corpus, const model::ModelConfig& config,
                                    std::size_t k, std::uint64_t fold_seed) {
    const auto folds = corpus::make_folds(corpus, k, fold_seed);
    std::size_t correct = 0, total = 0;
    for (std::size_t fold = 0; fold < k; ++fold) {
        std::vector<corpus::VoteRecord> train_votes, test_votes;
        for (const auto& v : corpus.votes) {
            if (folds.at(v.bill_id) == fold)
                test_votes.push_back(v);
            else
                train_votes.push_back(v);
        }
        if (train_votes.empty() || test_votes.empty())
            throw std::runtime_error("fold " + std::to_string(fold) + " has an empty partition");
        const auto [c, n] = train_and_score_linear(corpus, config, train_votes, test_votes);
        correct += c;
        total += n;
    }
    EvalResult r;
    r.model = "linear";
    r.setting = "in_session";
    r.split = "cv" + std::to_string(k);
    r.votes = total;
    r.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    return r;
}

std::vector<EvalResult> run_out_of_session_linear(
    const corpus::Corpus& corpus, const model::ModelConfig& config,
    const std::set<std::string>& train_sessions,
    const std::vector<std::set<std::string>>& test_blocks) {
    if (test_blocks.empty()) throw std::runtime_error("no test blocks given");
    std::set<std::string> all_test;
    for (const auto& block : test_blocks) all_test.insert(block.begin(), block.end());
    const auto split = corpus::out_of_session_split(corpus, train_sessions, all_test);
    if (split.train.empty()) throw std::runtime_error("no training votes in the train sessions");

    std::set<std::string> train_bills;
    for (const auto& v : split.train) train_bills.insert(v.bill_id);
    std::vector<const corpus::Bill*> bills;
    for (const auto& id : train_bills) bills.push_back(&corpus.bills.at(id));
    const auto vocab = corpus::Vocab::build(bills);

    auto m = LinearModel::init(vocab.size(), corpus.legislators.size());
    const auto train_data = model::make_dataset(corpus, split.train, vocab, config);
    train_linear(m, train_data, config);

    std::vector<EvalResult> results;
    for (const auto& block : test_blocks) {
        std::vector<corpus::VoteRecord> block_votes;
        for (const auto& v : split.test)
            if (block.count(corpus.bills.at(v.bill_id).session)) block_votes.push_back(v);
        if (block_votes.empty())
            throw std::runtime_error("test block " + block_label(block) +
                                     " is empty after legislator filtering");
        const auto data = model::make_dataset(corpus, block_votes, vocab, config);
        std::size_t correct = 0;
        for (const auto& ex : data.examples) {
            const double p = m.predict(data.bills[ex.bill], ex.leg_row);
            correct += ((p >= 0.5) == (ex.label > 0.5)) ? 1 : 0;
        }
        EvalResult r;
        r.model = "linear";
        r.setting = "out_of_session";
        r.split = block_label(block);
        r.votes = data.examples.size();
        r.accuracy = static_cast<double>(correct) / static_cast<double>(data.examples.size());
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace rollcall::eval
