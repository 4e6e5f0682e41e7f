#include "rollcall/nd/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace rollcall::nd {

void ParamStore::add(const std::string& name, Tensor value) {
    if (tensors_.count(name)) throw std::runtime_error("ParamStore: duplicate name " + name);
    tensors_.emplace(name, std::move(value));
}

void ParamStore::add_masked(const std::string& name, Tensor value, Tensor mask) {
    require_same_shape(value, mask, "ParamStore mask for " + name);
    add(name, std::move(value));
    masks_.emplace(name, std::move(mask));
}

Tensor& ParamStore::at(const std::string& name) {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw std::runtime_error("ParamStore: no parameter " + name);
    return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw std::runtime_error("ParamStore: no parameter " + name);
    return it->second;
}

const Tensor* ParamStore::mask(const std::string& name) const {
    auto it = masks_.find(name);
    return it == masks_.end() ? nullptr : &it->second;
}

TensorMap ParamStore::zero_grads() const {
    TensorMap grads;
    for (const auto& [name, value] : tensors_) grads.emplace(name, Tensor(value.shape()));
    return grads;
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& [name, value] : tensors_) n += value.size();
    return n;
}

AdaMaxState AdaMaxState::init(const ParamStore& params) {
    AdaMaxState s;
    for (const auto& [name, value] : params.tensors()) {
        s.m.emplace(name, Tensor(value.shape()));
        s.u.emplace(name, Tensor(value.shape()));
    }
    s.t = 0;
    return s;
}

void adamax_step(ParamStore& params, const TensorMap& grads, AdaMaxState& state,
                 const AdaMaxConfig& cfg) {
    state.t += 1;
    const double rate = cfg.alpha / (1.0 - std::pow(cfg.beta1, static_cast<double>(state.t)));
    for (auto& [name, theta] : params.tensors()) {
        auto git = grads.find(name);
        if (git == grads.end()) {
            throw std::runtime_error("adamax_step: missing gradient for " + name);
        }
        const Tensor& g = git->second;
        require_same_shape(theta, g, "adamax_step gradient for " + name);
        Tensor& m = state.m.at(name);
        Tensor& u = state.u.at(name);
        const Tensor* mask = params.mask(name);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (mask && (*mask)[i] == 0.0) continue;
            const double gi = g[i];
            if (!std::isfinite(gi)) {
                throw std::runtime_error("adamax_step: non-finite gradient in " + name +
                                         " at index " + std::to_string(i));
            }
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            const double mag = std::abs(gi);
            const double decayed = cfg.beta2 * u[i];
            u[i] = decayed > mag ? decayed : mag;
            theta[i] -= rate * m[i] / (u[i] + cfg.eps);
        }
    }
}

}  // namespace rollcall::nd
