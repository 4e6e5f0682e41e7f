#include "rollcall/enc/encoder.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rollcall::enc {

EncoderKind parse_encoder_kind(const std::string& s) {
    if (s == "mwe") return EncoderKind::mwe;
    if (s == "cnn") return EncoderKind::cnn;
    throw std::runtime_error("unknown encoder kind: " + s);
}

std::string to_string(EncoderKind k) { return k == EncoderKind::mwe ? "mwe" : "cnn"; }

nd::Tensor init_embeddings(std::size_t vocab_size, nd::Rng& rng) {
    nd::Tensor table({vocab_size, kWordDim});
    for (std::size_t r = 1; r < vocab_size; ++r)
        for (std::size_t c = 0; c < kWordDim; ++c) table.at(r, c) = rng.uniform(-0.25, 0.25);
    return table;
}

nd::Tensor load_pretrained(const std::filesystem::path& path, const corpus::Vocab& vocab,
                           nd::Rng& rng) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embedding file " + path.string());

    std::map<std::string, std::vector<double>> file_vecs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string token;
        is >> token;
        std::vector<double> vals;
        double v;
        while (is >> v) vals.push_back(v);
        if (token.empty() || vals.size() != kWordDim) {
            std::ostringstream os;
            os << path.filename().string() << ":" << lineno << ": expected `token` plus "
               << kWordDim << " values, got " << vals.size();
            throw std::runtime_error(os.str());
        }
        file_vecs[token] = std::move(vals);
    }

    // Row order equals sorted token order, so the random draws for missing
    // rows are reproducible from the seed alone.
    std::vector<const std::string*> row_token(vocab.size(), nullptr);
    for (const auto& [tok, idx] : vocab.entries()) row_token[idx] = &tok;

    nd::Tensor table({vocab.size(), kWordDim});
    for (std::size_t r = 1; r < vocab.size(); ++r) {
        const auto it = row_token[r] ? file_vecs.find(*row_token[r]) : file_vecs.end();
        if (it != file_vecs.end()) {
            for (std::size_t c = 0; c < kWordDim; ++c) table.at(r, c) = it->second[c];
        } else {
            for (std::size_t c = 0; c < kWordDim; ++c) table.at(r, c) = rng.uniform(-0.25, 0.25);
        }
    }
    return table;
}

nd::Tensor lookup_rows(const std::vector<std::uint32_t>& tokens, const nd::Tensor& table) {
    nd::Tensor rows({tokens.size(), table.cols()});
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] >= table.rows())
            throw std::runtime_error("token index " + std::to_string(tokens[i]) +
                                     " out of range for table with " +
                                     std::to_string(table.rows()) + " rows");
        for (std::size_t c = 0; c < table.cols(); ++c) rows.at(i, c) = table.at(tokens[i], c);
    }
    return rows;
}

void lookup_rows_backward(const std::vector<std::uint32_t>& tokens, const nd::Tensor& grad_rows,
                          nd::Tensor& grad_table) {
    for (std::size_t i = 0; i < tokens.size(); ++i)
        for (std::size_t c = 0; c < grad_table.cols(); ++c)
            grad_table.at(tokens[i], c) += grad_rows.at(i, c);
}

nd::Tensor encode_text(EncoderKind kind, const std::vector<std::uint32_t>& tokens,
                       const nd::Tensor& table, const nd::Tensor* filters, const nd::Tensor* bias,
                       std::size_t window, EncodeCache& cache) {
    cache.tokens = tokens;
    cache.rows = lookup_rows(tokens, table);
    if (kind == EncoderKind::mwe) return nd::mean_pool(cache.rows);
    if (!filters || !bias) throw std::runtime_error("cnn encoder needs filters and bias");
    cache.conv = nd::conv1d_ngram(cache.rows, *filters, *bias, window);
    return cache.conv.pooled;
}

void encode_text_backward(EncoderKind kind, const EncodeCache& cache, const nd::Tensor& grad_out,
                          const nd::Tensor* filters, std::size_t window, nd::Tensor& grad_table,
                          nd::Tensor* grad_filters, nd::Tensor* grad_bias) {
    if (kind == EncoderKind::mwe) {
        if (cache.tokens.empty()) return;  // zero vector had no dependence on params
        nd::Tensor grad_rows({cache.tokens.size(), grad_table.cols()});
        nd::mean_pool_backward(cache.tokens.size(), grad_out, grad_rows);
        lookup_rows_backward(cache.tokens, grad_rows, grad_table);
        return;
    }
    if (!filters || !grad_filters || !grad_bias)
        throw std::runtime_error("cnn encoder backward needs filter tensors");
    nd::Tensor grad_rows({cache.tokens.size(), grad_table.cols()});
    nd::conv1d_ngram_backward(cache.rows, *filters, window, cache.conv, grad_out, grad_rows,
                              *grad_filters, *grad_bias);
    lookup_rows_backward(cache.tokens, grad_rows, grad_table);
}

nd::Tensor mix_sponsor(const nd::Tensor& t_r, const nd::Tensor& t_d, const nd::Tensor& a_r,
                       const nd::Tensor& a_d, double p_r, double p_d) {
    nd::require_same_shape(t_r, t_d, "mix_sponsor");
    nd::require_same_shape(t_r, a_r, "mix_sponsor");
    nd::require_same_shape(t_r, a_d, "mix_sponsor");
    nd::Tensor v(t_r.shape());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = p_r * a_r[i] * t_r[i] + p_d * a_d[i] * t_d[i];
    return v;
}

void mix_sponsor_backward(const nd::Tensor& t_r, const nd::Tensor& t_d, const nd::Tensor& a_r,
                          const nd::Tensor& a_d, double p_r, double p_d, const nd::Tensor& grad_v,
                          nd::Tensor& grad_t_r, nd::Tensor& grad_t_d, nd::Tensor& grad_a_r,
                          nd::Tensor& grad_a_d) {
    for (std::size_t i = 0; i < grad_v.size(); ++i) {
        grad_t_r[i] += grad_v[i] * p_r * a_r[i];
        grad_a_r[i] += grad_v[i] * p_r * t_r[i];
        grad_t_d[i] += grad_v[i] * p_d * a_d[i];
        grad_a_d[i] += grad_v[i] * p_d * t_d[i];
    }
}

std::vector<std::uint32_t> dummy_tokens(std::size_t length, std::uint32_t vocab_size,
                                        std::uint64_t seed) {
    if (length == 0) throw std::runtime_error("dummy_tokens: length must be positive");
    if (vocab_size <= 2)
        throw std::runtime_error("dummy_tokens: vocabulary has no real tokens to sample");
    nd::Rng rng(seed);
    std::vector<std::uint32_t> out(length);
    for (auto& t : out) t = 2 + static_cast<std::uint32_t>(rng.below(vocab_size - 2));
    return out;
}

}  // namespace rollcall::enc
