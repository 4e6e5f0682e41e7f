#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "rollcall/enc/encoder.hpp"
#include "rollcall/nd/optim.hpp"

namespace rollcall::model {

enum class TextSource { summary, fulltext, dummy };

TextSource parse_text_source(const std::string& s);
std::string to_string(TextSource t);

// One struct configures every model variant: the encoder kind, whether the
// sponsor-metadata mixing is on, and which text channel feeds the encoder.
// `text = dummy` replaces every bill's text with one fixed random sequence,
// which reduces the predictor to sponsor metadata alone.
struct ModelConfig {
    enc::EncoderKind encoder = enc::EncoderKind::mwe;
    bool metadata = false;
    TextSource text = TextSource::summary;

    std::size_t leg_dim = 25;
    std::size_t filters = 400;  // cnn filter maps
    std::size_t window = 4;     // cnn n-gram width
    std::size_t dummy_length = 50;
    bool shared_text_params = false;  // one table/filter bank for both parties
    std::string pretrained_path;      // empty = random embedding init

    nd::AdaMaxConfig optimizer;
    std::uint64_t seed = 1;
    std::size_t epochs = 50;
    std::size_t batch_size = 50;
    bool shuffle = true;

    // mwe: word dim; cnn: filter count.
    std::size_t d_text() const {
        return encoder == enc::EncoderKind::cnn ? filters : enc::kWordDim;
    }

    // "mwe", "cnn", "mwe_meta", "cnn_meta", or "meta_only".
    std::string model_name() const;

    static ModelConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

}  // namespace rollcall::model
