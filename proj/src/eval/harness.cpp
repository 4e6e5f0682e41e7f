#include "rollcall/eval/harness.hpp"

#include <stdexcept>

#include "rollcall/corpus/vocab.hpp"
#include "rollcall/model/model.hpp"
#include "rollcall/model/train.hpp"

namespace rollcall::eval {

double accuracy(const std::vector<double>& probs, const std::vector<double>& labels) {
    if (probs.empty() || probs.size() != labels.size())
        throw std::runtime_error("accuracy: need equal-length nonempty inputs");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        correct += ((probs[i] >= 0.5) == (labels[i] > 0.5)) ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(probs.size());
}

double guess_yes(const std::vector<double>& labels) {
    if (labels.empty()) throw std::runtime_error("guess_yes: empty labels");
    double yes = 0;
    for (double y : labels) yes += (y > 0.5) ? 1.0 : 0.0;
    return yes / static_cast<double>(labels.size());
}

std::vector<double> labels_of(const std::vector<corpus::VoteRecord>& votes) {
    std::vector<double> out;
    out.reserve(votes.size());
    for (const auto& v : votes) out.push_back(v.outcome ? 1.0 : 0.0);
    return out;
}

std::string block_label(const std::set<std::string>& sessions) {
    std::string label;
    for (const auto& s : sessions) {
        if (!label.empty()) label += "+";
        label += s;
    }
    return label;
}

namespace {

corpus::Vocab vocab_from_bills(const corpus::Corpus& corpus, const std::set<std::string>& bill_ids) {
    std::vector<const corpus::Bill*> bills;
    bills.reserve(bill_ids.size());
    for (const auto& id : bill_ids) bills.push_back(&corpus.bills.at(id));
    return corpus::Vocab::build(bills);
}

// Trains on `train_votes` (vocabulary from the train bills only) and counts
// correct predictions on `test_votes`.
std::pair<std::size_t, std::size_t> train_and_score(const corpus::Corpus& corpus,
                                                    const model::ModelConfig& config,
                                                    const std::vector<corpus::VoteRecord>& train_votes,
                                                    const std::vector<corpus::VoteRecord>& test_votes) {
    std::set<std::string> train_bills;
    for (const auto& v : train_votes) train_bills.insert(v.bill_id);
    const auto vocab = vocab_from_bills(corpus, train_bills);

    auto m = model::VoteModel::init(config, vocab, corpus.legislators.size());
    const auto train_data = model::make_dataset(corpus, train_votes, vocab, config);
    model::train_model(m, train_data);

    const auto test_data = model::make_dataset(corpus, test_votes, vocab, config);
    std::size_t correct = 0;
    for (const auto& ex : test_data.examples) {
        const double p = m.predict(test_data.bills[ex.bill], ex.leg_row);
        correct += ((p >= 0.5) == (ex.label > 0.5)) ? 1 : 0;
    }
    return {correct, test_data.examples.size()};
}

}  // namespace

EvalResult run_in_session_cv(const corpus::Corpus& corpus, const model::ModelConfig& config,
                             std::size_t k, std::uint64_t fold_seed) {
    const auto folds = corpus::make_folds(corpus, k, fold_seed);
    std::size_t correct = 0, total = 0;
    for (std::size_t fold = 0; fold < k; ++fold) {
        std::vector<corpus::VoteRecord> train_votes, test_votes;
        for (const auto& v : corpus.votes) {
            if (folds.at(v.bill_id) == fold)
                test_votes.push_back(v);
            else
                train_votes.push_back(v);
        }
        if (train_votes.empty() || test_votes.empty())
            throw std::runtime_error("fold " + std::to_string(fold) + " has an empty partition");
        const auto [c, n] = train_and_score(corpus, config, train_votes, test_votes);
        correct += c;
        total += n;
    }
    EvalResult r;
    r.model = config.model_name();
    r.setting = "in_session";
    r.split = "cv" + std::to_string(k);
    r.votes = total;
    r.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    return r;
}

std::vector<EvalResult> run_out_of_session(const corpus::Corpus& corpus,
                                           const model::ModelConfig& config,
                                           const std::set<std::string>& train_sessions,
                                           const std::vector<std::set<std::string>>& test_blocks) {
    if (test_blocks.empty()) throw std::runtime_error("no test blocks given");
    std::set<std::string> all_test;
    for (const auto& block : test_blocks) all_test.insert(block.begin(), block.end());
    const auto split = corpus::out_of_session_split(corpus, train_sessions, all_test);
    if (split.train.empty()) throw std::runtime_error("no training votes in the train sessions");

    std::set<std::string> train_bills;
    for (const auto& v : split.train) train_bills.insert(v.bill_id);
    const auto vocab = vocab_from_bills(corpus, train_bills);

    auto m = model::VoteModel::init(config, vocab, corpus.legislators.size());
    const auto train_data = model::make_dataset(corpus, split.train, vocab, config);
    model::train_model(m, train_data);

    std::vector<EvalResult> results;
    for (const auto& block : test_blocks) {
        std::vector<corpus::VoteRecord> block_votes;
        for (const auto& v : split.test)
            if (block.count(corpus.bills.at(v.bill_id).session)) block_votes.push_back(v);
        if (block_votes.empty())
            throw std::runtime_error("test block " + block_label(block) +
                                     " is empty after legislator filtering");
        const auto data = model::make_dataset(corpus, block_votes, vocab, config);
        std::size_t correct = 0;
        for (const auto& ex : data.examples) {
            const double p = m.predict(data.bills[ex.bill], ex.leg_row);
            correct += ((p >= 0.5) == (ex.label > 0.5)) ? 1 : 0;
        }
        EvalResult r;
        r.model = config.model_name();
        r.setting = "out_of_session";
        r.split = block_label(block);
        r.votes = data.examples.size();
        r.accuracy = static_cast<double>(correct) / static_cast<double>(data.examples.size());
        results.push_back(std::move(r));
    }
    return results;
}

EvalResult guess_yes_in_session(const corpus::Corpus& corpus, std::size_t k) {
    EvalResult r;
    r.model = "guess_yes";
    r.setting = "in_session";
    r.split = "cv" + std::to_string(k);
    r.votes = corpus.votes.size();
    r.accuracy = guess_yes(labels_of(corpus.votes));
    return r;
}

std::vector<EvalResult> guess_yes_out_of_session(
    const corpus::Corpus& corpus, const std::set<std::string>& train_sessions,
    const std::vector<std::set<std::string>>& test_blocks) {
    std::set<std::string> all_test;
    for (const auto& block : test_blocks) all_test.insert(block.begin(), block.end());
    const auto split = corpus::out_of_session_split(corpus, train_sessions, all_test);

    std::vector<EvalResult> results;
    for (const auto& block : test_blocks) {
        std::vector<double> labels;
        for (const auto& v : split.test)
            if (block.count(corpus.bills.at(v.bill_id).session))
                labels.push_back(v.outcome ? 1.0 : 0.0);
        if (labels.empty())
            throw std::runtime_error("test block " + block_label(block) +
                                     " is empty after legislator filtering");
        EvalResult r;
        r.model = "guess_yes";
        r.setting = "out_of_session";
        r.split = block_label(block);
        r.votes = labels.size();
        r.accuracy = guess_yes(labels);
        results.push_back(std::move(r));
    }
    return results;
}

model::ModelConfig variant_config(const model::ModelConfig& base, const std::string& name) {
    model::ModelConfig c = base;
    std::string stem = name;
    bool fulltext = false;
    if (stem.size() > 3 && stem.compare(stem.size() - 3, 3, "_ft") == 0) {
        fulltext = true;
        stem.resize(stem.size() - 3);
    }
    if (stem == "meta_only") {
        if (fulltext) throw std::runtime_error("meta_only ignores text and has no _ft variant");
        c.encoder = enc::EncoderKind::mwe;
        c.metadata = true;
        c.text = model::TextSource::dummy;
    } else {
        if (stem == "mwe" || stem == "mwe_meta")
            c.encoder = enc::EncoderKind::mwe;
        else if (stem == "cnn" || stem == "cnn_meta")
            c.encoder = enc::EncoderKind::cnn;
        else
            throw std::runtime_error("unknown model name `" + name + "`");
        c.metadata = stem.find("_meta") != std::string::npos;
        c.text = fulltext ? model::TextSource::fulltext : model::TextSource::summary;
    }
    c.validate();
    return c;
}

}  // namespace rollcall::eval
