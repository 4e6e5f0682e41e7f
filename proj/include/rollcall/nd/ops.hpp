#pragma once

#include <cstddef>
#include <vector>

#include "rollcall/nd/rng.hpp"
#include "rollcall/nd/tensor.hpp"

namespace rollcall::nd {

// Every forward op has a matching backward that ACCUMULATES (+=) into the
// provided gradient tensors, so one buffer can collect a whole batch.

// y = W x + b, with W of shape [d_out x d_in].
Tensor affine(const Tensor& W, const Tensor& x, const Tensor& b);
void affine_backward(const Tensor& W, const Tensor& x, const Tensor& grad_y,
                     Tensor& grad_W, Tensor& grad_x, Tensor& grad_b);

Tensor elementwise_mul(const Tensor& a, const Tensor& b);
void elementwise_mul_backward(const Tensor& a, const Tensor& b, const Tensor& grad_out,
                              Tensor& grad_a, Tensor& grad_b);

// Columnwise mean of an [n x d] matrix; n = 0 yields the zero vector.
Tensor mean_pool(const Tensor& rows);
void mean_pool_backward(std::size_t n_rows, const Tensor& grad_out, Tensor& grad_rows);

// Narrow 1-d convolution over token embeddings with ReLU and max-over-time.
// `embeddings` is [n x d], `filters` is [F x (window*d)]. Inputs shorter than
// the window are padded with zero rows (the pinned padding embedding).
struct ConvCache {
    Tensor pooled;                      // [F] after ReLU + max-over-time
    std::vector<std::size_t> best_pos;  // winning window start per filter
    Tensor best_pre;                    // winning pre-activation per filter
};
ConvCache conv1d_ngram(const Tensor& embeddings, const Tensor& filters, const Tensor& bias,
                       std::size_t window);
void conv1d_ngram_backward(const Tensor& embeddings, const Tensor& filters, std::size_t window,
                           const ConvCache& cache, const Tensor& grad_out, Tensor& grad_embeddings,
                           Tensor& grad_filters, Tensor& grad_bias);

// Fused sigmoid + binary cross-entropy in the overflow-safe form.
struct BceResult {
    double prob;
    double loss;
};
BceResult sigmoid_bce(double logit, double label);
// d loss / d logit = prob - label.
double sigmoid_bce_backward(double logit, double label);

double sigmoid(double logit);
double dot(const Tensor& a, const Tensor& b);

// Entries i.i.d. uniform on [-b, b] with b = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::vector<std::size_t> shape,
                      Rng& rng);

}  // namespace rollcall::nd
