#include "rollcall/nd/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "rollcall/nd/rng.hpp"

namespace rollcall::nd {

GradCheckReport grad_check(const std::function<double(const ParamStore&)>& loss_fn,
                           const ParamStore& params, const TensorMap& analytic_grads, double eps,
                           double tolerance, std::size_t max_coords_per_tensor,
                           std::uint64_t sample_seed) {
    GradCheckReport report;
    report.tolerance = tolerance;
    ParamStore work = params;  // perturbed in place, restored after each probe
    Rng rng(sample_seed);

    for (auto& [name, theta] : work.tensors()) {
        const Tensor* mask = work.mask(name);
        auto git = analytic_grads.find(name);
        const Tensor* analytic = git == analytic_grads.end() ? nullptr : &git->second;

        std::vector<std::size_t> coords;
        if (max_coords_per_tensor == 0 || theta.size() <= max_coords_per_tensor) {
            coords.resize(theta.size());
            for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        } else {
            std::vector<std::size_t> all(theta.size());
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
            rng.shuffle(all);
            coords.assign(all.begin(), all.begin() + max_coords_per_tensor);
            std::sort(coords.begin(), coords.end());
        }

        for (std::size_t i : coords) {
            if (mask && (*mask)[i] == 0.0) continue;
            const double saved = theta[i];
            theta[i] = saved + eps;
            const double up = loss_fn(work);
            theta[i] = saved - eps;
            const double down = loss_fn(work);
            theta[i] = saved;

            const double numeric = (up - down) / (2.0 * eps);
            const double analytic_v = analytic ? (*analytic)[i] : 0.0;
            const double denom =
                std::max({std::abs(analytic_v), std::abs(numeric), 1e-8});
            const double rel = std::abs(analytic_v - numeric) / denom;

            ++report.coords_checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst = {name, i, analytic_v, numeric, rel};
            }
            if (rel > tolerance) {
                report.failures.push_back({name, i, analytic_v, numeric, rel});
            }
        }
    }
    return report;
}

}  // namespace rollcall::nd
