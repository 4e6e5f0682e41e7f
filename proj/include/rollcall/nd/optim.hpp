#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rollcall/nd/tensor.hpp"

namespace rollcall::nd {

// std::map keeps iteration order deterministic; parameter and checkpoint
// bytes then depend only on names and values.
using TensorMap = std::map<std::string, Tensor>;

// Named trainable tensors plus optional per-entry update masks. A mask has
// the parameter's shape; entries equal to 0 are frozen (the pinned padding
// embedding row) and are never touched by the optimizer.
class ParamStore {
public:
    void add(const std::string& name, Tensor value);
    void add_masked(const std::string& name, Tensor value, Tensor mask);

    bool has(const std::string& name) const { return tensors_.count(name) > 0; }
    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    const Tensor* mask(const std::string& name) const;  // nullptr when unmasked

    TensorMap& tensors() { return tensors_; }
    const TensorMap& tensors() const { return tensors_; }
    const TensorMap& masks() const { return masks_; }

    // Zero tensors with matching names/shapes, for gradient accumulation.
    TensorMap zero_grads() const;
    std::size_t total_size() const;

private:
    TensorMap tensors_;
    TensorMap masks_;
};

struct AdaMaxConfig {
    double alpha = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdaMaxState {
    TensorMap m;  // first moment
    TensorMap u;  // exponentially weighted infinity norm
    long t = 0;

    static AdaMaxState init(const ParamStore& params);
};

// One update: t += 1; m = b1*m + (1-b1)*g; u = max(b2*u, |g|);
// theta -= alpha/(1-b1^t) * m/(u+eps). Masked entries stay untouched.
// Throws on non-finite gradients, naming the offending parameter.
void adamax_step(ParamStore& params, const TensorMap& grads, AdaMaxState& state,
                 const AdaMaxConfig& cfg);

}  // namespace rollcall::nd
