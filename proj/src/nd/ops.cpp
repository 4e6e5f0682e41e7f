#include "rollcall/nd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rollcall::nd {

Tensor affine(const Tensor& W, const Tensor& x, const Tensor& b) {
    if (W.ndim() != 2 || x.ndim() != 1 || b.ndim() != 1 || W.cols() != x.size() ||
        W.rows() != b.size()) {
        throw std::runtime_error("affine: shape mismatch W" + W.shape_str() + " x" +
                                 x.shape_str() + " b" + b.shape_str());
    }
    const std::size_t d_out = W.rows(), d_in = W.cols();
    Tensor y({d_out});
    for (std::size_t r = 0; r < d_out; ++r) {
        const double* wr = W.row_ptr(r);
        double acc = b[r];
        for (std::size_t c = 0; c < d_in; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
    return y;
}

void affine_backward(const Tensor& W, const Tensor& x, const Tensor& grad_y, Tensor& grad_W,
                     Tensor& grad_x, Tensor& grad_b) {
    const std::size_t d_out = W.rows(), d_in = W.cols();
    if (grad_y.size() != d_out || grad_x.size() != d_in || !grad_W.same_shape(W) ||
        grad_b.size() != d_out) {
        throw std::runtime_error("affine_backward: shape mismatch");
    }
    for (std::size_t r = 0; r < d_out; ++r) {
        const double g = grad_y[r];
        const double* wr = W.row_ptr(r);
        double* gw = grad_W.row_ptr(r);
        grad_b[r] += g;
        for (std::size_t c = 0; c < d_in; ++c) {
            gw[c] += g * x[c];
            grad_x[c] += g * wr[c];
        }
    }
}

Tensor elementwise_mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "elementwise_mul");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

void elementwise_mul_backward(const Tensor& a, const Tensor& b, const Tensor& grad_out,
                              Tensor& grad_a, Tensor& grad_b) {
    require_same_shape(a, b, "elementwise_mul_backward");
    require_same_shape(grad_out, a, "elementwise_mul_backward grad");
    for (std::size_t i = 0; i < a.size(); ++i) {
        grad_a[i] += grad_out[i] * b[i];
        grad_b[i] += grad_out[i] * a[i];
    }
}

Tensor mean_pool(const Tensor& rows) {
    if (rows.ndim() != 2) throw std::runtime_error("mean_pool: expected [n x d] input");
    const std::size_t n = rows.rows(), d = rows.cols();
    Tensor out({d});
    if (n == 0) return out;
    for (std::size_t r = 0; r < n; ++r) {
        const double* p = rows.row_ptr(r);
        for (std::size_t c = 0; c < d; ++c) out[c] += p[c];
    }
    for (std::size_t c = 0; c < d; ++c) out[c] /= static_cast<double>(n);
    return out;
}

void mean_pool_backward(std::size_t n_rows, const Tensor& grad_out, Tensor& grad_rows) {
    if (n_rows == 0) return;
    if (grad_rows.ndim() != 2 || grad_rows.rows() != n_rows || grad_rows.cols() != grad_out.size()) {
        throw std::runtime_error("mean_pool_backward: shape mismatch");
    }
    const double inv = 1.0 / static_cast<double>(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        double* p = grad_rows.row_ptr(r);
        for (std::size_t c = 0; c < grad_out.size(); ++c) p[c] += grad_out[c] * inv;
    }
}

ConvCache conv1d_ngram(const Tensor& embeddings, const Tensor& filters, const Tensor& bias,
                       std::size_t window) {
    if (embeddings.ndim() != 2 || filters.ndim() != 2 || window == 0) {
        throw std::runtime_error("conv1d_ngram: bad arguments");
    }
    const std::size_t n = embeddings.rows(), d = embeddings.cols();
    const std::size_t n_filters = filters.rows();
    if (filters.cols() != window * d || bias.size() != n_filters) {
        throw std::runtime_error("conv1d_ngram: filter width " + std::to_string(filters.cols()) +
                                 " does not match window*d = " + std::to_string(window * d));
    }
    // Short inputs behave as if padded with zero rows up to the window size.
    const std::size_t eff_n = n < window ? window : n;
    const std::size_t n_windows = eff_n - window + 1;

    ConvCache cache;
    cache.pooled = Tensor({n_filters});
    cache.best_pos.assign(n_filters, 0);
    cache.best_pre = Tensor({n_filters});

    std::vector<double> win(window * d, 0.0);
    bool first = true;
    for (std::size_t pos = 0; pos < n_windows; ++pos) {
        for (std::size_t k = 0; k < window; ++k) {
            const std::size_t row = pos + k;
            if (row < n) {
                const double* src = embeddings.row_ptr(row);
                std::copy(src, src + d, win.begin() + k * d);
            } else {
                std::fill(win.begin() + k * d, win.begin() + (k + 1) * d, 0.0);
            }
        }
        for (std::size_t f = 0; f < n_filters; ++f) {
            const double* fr = filters.row_ptr(f);
            double pre = bias[f];
            for (std::size_t i = 0; i < window * d; ++i) pre += fr[i] * win[i];
            if (first || pre > cache.best_pre[f]) {
                cache.best_pre[f] = pre;
                cache.best_pos[f] = pos;
            }
        }
        first = false;
    }
    for (std::size_t f = 0; f < n_filters; ++f) {
        cache.pooled[f] = cache.best_pre[f] > 0.0 ? cache.best_pre[f] : 0.0;
    }
    return cache;
}

void conv1d_ngram_backward(const Tensor& embeddings, const Tensor& filters, std::size_t window,
                           const ConvCache& cache, const Tensor& grad_out, Tensor& grad_embeddings,
                           Tensor& grad_filters, Tensor& grad_bias) {
    const std::size_t n = embeddings.rows(), d = embeddings.cols();
    const std::size_t n_filters = filters.rows();
    if (grad_out.size() != n_filters) throw std::runtime_error("conv1d_ngram_backward: bad grad");
    for (std::size_t f = 0; f < n_filters; ++f) {
        // max-over-time routes the gradient to the winning window; ReLU gates it.
        if (cache.best_pre[f] <= 0.0) continue;
        const double g = grad_out[f];
        if (g == 0.0) continue;
        const std::size_t pos = cache.best_pos[f];
        const double* fr = filters.row_ptr(f);
        double* gf = grad_filters.row_ptr(f);
        grad_bias[f] += g;
        for (std::size_t k = 0; k < window; ++k) {
            const std::size_t row = pos + k;
            if (row >= n) continue;  // zero-padded position, pinned pad row
            const double* emb = embeddings.row_ptr(row);
            double* gemb = grad_embeddings.row_ptr(row);
            for (std::size_t c = 0; c < d; ++c) {
                gf[k * d + c] += g * emb[c];
                gemb[c] += g * fr[k * d + c];
            }
        }
    }
}

double sigmoid(double logit) {
    if (logit >= 0.0) {
        return 1.0 / (1.0 + std::exp(-logit));
    }
    const double e = std::exp(logit);
    return e / (1.0 + e);
}

namespace {
inline double softplus(double x) {
    // log(1 + e^x) without overflow.
    const double m = x > 0.0 ? x : 0.0;
    return m + std::log1p(std::exp(-std::abs(x)));
}
}  // namespace

BceResult sigmoid_bce(double logit, double label) {
    if (label != 0.0 && label != 1.0) {
        throw std::runtime_error("sigmoid_bce: label must be 0 or 1");
    }
    BceResult r;
    r.prob = sigmoid(logit);
    r.loss = label * softplus(-logit) + (1.0 - label) * softplus(logit);
    return r;
}

double sigmoid_bce_backward(double logit, double label) {
    return sigmoid(logit) - label;
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::vector<std::size_t> shape,
                      Rng& rng) {
    if (fan_in == 0 || fan_out == 0) {
        throw std::runtime_error("glorot_uniform: fans must be >= 1");
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
}

}  // namespace rollcall::nd
