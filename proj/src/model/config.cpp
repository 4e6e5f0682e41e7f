#include "rollcall/model/config.hpp"

#include <set>
#include <stdexcept>

namespace rollcall::model {

using nlohmann::json;

TextSource parse_text_source(const std::string& s) {
    if (s == "summary") return TextSource::summary;
    if (s == "fulltext") return TextSource::fulltext;
    if (s == "dummy") return TextSource::dummy;
    throw std::runtime_error("unknown text source: " + s);
}

std::string to_string(TextSource t) {
    switch (t) {
        case TextSource::summary: return "summary";
        case TextSource::fulltext: return "fulltext";
        default: return "dummy";
    }
}

std::string ModelConfig::model_name() const {
    if (text == TextSource::dummy) return "meta_only";
    std::string name = enc::to_string(encoder);
    if (metadata) name += "_meta";
    if (text == TextSource::fulltext) name += "_ft";
    return name;
}

void ModelConfig::validate() const {
    if (text == TextSource::dummy && !metadata)
        throw std::runtime_error(
            "text=dummy strips every bill-specific signal unless metadata mixing is enabled");
    if (leg_dim == 0) throw std::runtime_error("leg_dim must be positive");
    if (encoder == enc::EncoderKind::cnn && (filters == 0 || window == 0))
        throw std::runtime_error("cnn needs positive filters and window");
    if (dummy_length == 0) throw std::runtime_error("dummy_length must be positive");
    if (batch_size == 0) throw std::runtime_error("batch_size must be positive");
    if (!(optimizer.alpha > 0)) throw std::runtime_error("optimizer alpha must be positive");
}

ModelConfig ModelConfig::from_json(const json& j) {
    static const std::set<std::string> known{
        "encoder",    "metadata",  "text",       "leg_dim",           "filters",
        "window",     "dummy_length", "shared_text_params", "pretrained_path", "optimizer",
        "seed",       "epochs",    "batch_size", "shuffle"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw std::runtime_error("unknown config key `" + key + "`");

    ModelConfig c;
    if (j.contains("encoder")) c.encoder = enc::parse_encoder_kind(j.at("encoder").get<std::string>());
    if (j.contains("metadata")) c.metadata = j.at("metadata").get<bool>();
    if (j.contains("text")) c.text = parse_text_source(j.at("text").get<std::string>());
    if (j.contains("leg_dim")) c.leg_dim = j.at("leg_dim").get<std::size_t>();
    if (j.contains("filters")) c.filters = j.at("filters").get<std::size_t>();
    if (j.contains("window")) c.window = j.at("window").get<std::size_t>();
    if (j.contains("dummy_length")) c.dummy_length = j.at("dummy_length").get<std::size_t>();
    if (j.contains("shared_text_params"))
        c.shared_text_params = j.at("shared_text_params").get<bool>();
    if (j.contains("pretrained_path")) c.pretrained_path = j.at("pretrained_path").get<std::string>();
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        if (o.contains("alpha")) c.optimizer.alpha = o.at("alpha").get<double>();
        if (o.contains("beta1")) c.optimizer.beta1 = o.at("beta1").get<double>();
        if (o.contains("beta2")) c.optimizer.beta2 = o.at("beta2").get<double>();
        if (o.contains("eps")) c.optimizer.eps = o.at("eps").get<double>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("shuffle")) c.shuffle = j.at("shuffle").get<bool>();
    c.validate();
    return c;
}

json ModelConfig::to_json() const {
    return json{{"encoder", enc::to_string(encoder)},
                {"metadata", metadata},
                {"text", to_string(text)},
                {"leg_dim", leg_dim},
                {"filters", filters},
                {"window", window},
                {"dummy_length", dummy_length},
                {"shared_text_params", shared_text_params},
                {"pretrained_path", pretrained_path},
                {"optimizer",
                 {{"alpha", optimizer.alpha},
                  {"beta1", optimizer.beta1},
                  {"beta2", optimizer.beta2},
                  {"eps", optimizer.eps}}},
                {"seed", seed},
                {"epochs", epochs},
                {"batch_size", batch_size},
                {"shuffle", shuffle}};
}

}  // namespace rollcall::model
