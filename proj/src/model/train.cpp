#include "rollcall/model/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rollcall::model {

namespace {
constexpr std::uint64_t kShuffleStream = 0x73687566ULL;
}

TrainHistory train_model(VoteModel& model, const Dataset& data) {
    if (data.examples.empty()) throw std::runtime_error("train_model: empty training set");
    const auto& cfg = model.config();

    auto state = nd::AdaMaxState::init(model.params());
    nd::Rng shuffle_rng = nd::Rng(cfg.seed).derive(kShuffleStream);

    std::vector<std::size_t> order(data.examples.size());
    std::iota(order.begin(), order.end(), 0);

    TrainHistory history;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double scale = 1.0 / static_cast<double>(end - start);

            auto grads = model.params().zero_grads();
            for (std::size_t i = start; i < end; ++i) {
                const Example& ex = data.examples[order[i]];
                const auto r = model.forward_backward(data.bills[ex.bill], ex.leg_row, ex.label,
                                                      scale, grads);
                if (!std::isfinite(r.loss))
                    throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                             ", batch starting at " + std::to_string(start));
                loss_sum += r.loss;
                correct += ((r.prob >= 0.5) == (ex.label > 0.5)) ? 1 : 0;
            }
            nd::adamax_step(model.params(), grads, state, cfg.optimizer);
        }

        EpochStats s;
        s.mean_loss = loss_sum / static_cast<double>(order.size());
        s.accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
        history.epochs.push_back(s);
    }
    return history;
}

std::pair<double, double> evaluate_model(const VoteModel& model, const Dataset& data) {
    if (data.examples.empty()) throw std::runtime_error("evaluate_model: empty dataset");
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (const Example& ex : data.examples) {
        const double p = model.predict(data.bills[ex.bill], ex.leg_row);
        const double y = ex.label;
        loss_sum += -(y * std::log(std::max(p, 1e-300)) +
                      (1.0 - y) * std::log(std::max(1.0 - p, 1e-300)));
        correct += ((p >= 0.5) == (y > 0.5)) ? 1 : 0;
    }
    return {loss_sum / static_cast<double>(data.examples.size()),
            static_cast<double>(correct) / static_cast<double>(data.examples.size())};
}

}  // namespace rollcall::model
