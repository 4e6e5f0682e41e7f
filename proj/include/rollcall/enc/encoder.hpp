#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rollcall/corpus/vocab.hpp"
#include "rollcall/nd/ops.hpp"
#include "rollcall/nd/rng.hpp"
#include "rollcall/nd/tensor.hpp"

namespace rollcall::enc {

inline constexpr std::size_t kWordDim = 50;

enum class EncoderKind { mwe, cnn };

EncoderKind parse_encoder_kind(const std::string& s);
std::string to_string(EncoderKind k);

// Fresh table: row 0 (padding) zero, every other row uniform on [-0.25, 0.25].
nd::Tensor init_embeddings(std::size_t vocab_size, nd::Rng& rng);

// Rows are `token v1 ... v50`. Vocab tokens present in the file get the file
// vector; missing tokens (the OOV row included) draw uniform [-0.25, 0.25] in
// row order, so the result is a pure function of (file, vocab, seed).
nd::Tensor load_pretrained(const std::filesystem::path& path, const corpus::Vocab& vocab,
                           nd::Rng& rng);

// Embedding lookup: [n] indices -> [n x d] rows. Throws on out-of-range.
nd::Tensor lookup_rows(const std::vector<std::uint32_t>& tokens, const nd::Tensor& table);
// Scatter-add of per-row gradients back into the table gradient.
void lookup_rows_backward(const std::vector<std::uint32_t>& tokens, const nd::Tensor& grad_rows,
                          nd::Tensor& grad_table);

struct EncodeCache {
    std::vector<std::uint32_t> tokens;
    nd::Tensor rows;  // looked-up embeddings, [n x d_w]
    nd::ConvCache conv;
};

// Text representation: mwe -> mean of embedding rows (d_text = d_w);
// cnn -> 4-gram convolution, ReLU, max-over-time (d_text = filter count).
// `filters`/`bias` must be non-null iff kind == cnn.
nd::Tensor encode_text(EncoderKind kind, const std::vector<std::uint32_t>& tokens,
                       const nd::Tensor& table, const nd::Tensor* filters, const nd::Tensor* bias,
                       std::size_t window, EncodeCache& cache);
void encode_text_backward(EncoderKind kind, const EncodeCache& cache, const nd::Tensor& grad_out,
                          const nd::Tensor* filters, std::size_t window, nd::Tensor& grad_table,
                          nd::Tensor* grad_filters, nd::Tensor* grad_bias);

// v_B = (p_r * a_r) (.) t_r + (p_d * a_d) (.) t_d, the party-gated mixture of
// the two text representations.
nd::Tensor mix_sponsor(const nd::Tensor& t_r, const nd::Tensor& t_d, const nd::Tensor& a_r,
                       const nd::Tensor& a_d, double p_r, double p_d);
void mix_sponsor_backward(const nd::Tensor& t_r, const nd::Tensor& t_d, const nd::Tensor& a_r,
                          const nd::Tensor& a_d, double p_r, double p_d, const nd::Tensor& grad_v,
                          nd::Tensor& grad_t_r, nd::Tensor& grad_t_d, nd::Tensor& grad_a_r,
                          nd::Tensor& grad_a_d);

// One seed-fixed sequence of real-token indices (>= 2), reused verbatim for
// every bill when the text channel is replaced by a constant.
std::vector<std::uint32_t> dummy_tokens(std::size_t length, std::uint32_t vocab_size,
                                        std::uint64_t seed);

}  // namespace rollcall::enc
