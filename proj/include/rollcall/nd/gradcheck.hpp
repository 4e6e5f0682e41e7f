#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rollcall/nd/optim.hpp"

namespace rollcall::nd {

struct GradCheckEntry {
    std::string param;
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    GradCheckEntry worst;
    std::vector<GradCheckEntry> failures;  // entries exceeding the tolerance
    std::size_t coords_checked = 0;
    double tolerance = 0.0;

    bool pass() const { return failures.empty(); }
};

// Central finite differences (f(x+eps) - f(x-eps)) / (2 eps) against the
// supplied analytic gradients. rel_err = |a-n| / max(|a|, |n|, 1e-8).
// Masked coordinates are skipped. With max_coords_per_tensor = 0 every
// coordinate is checked; otherwise a seeded subsample per tensor.
GradCheckReport grad_check(const std::function<double(const ParamStore&)>& loss_fn,
                           const ParamStore& params, const TensorMap& analytic_grads, double eps,
                           double tolerance, std::size_t max_coords_per_tensor = 0,
                           std::uint64_t sample_seed = 0);

}  // namespace rollcall::nd
