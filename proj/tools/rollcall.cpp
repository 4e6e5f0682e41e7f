#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rollcall/corpus/corpus.hpp"
#include "rollcall/corpus/parse.hpp"
#include "rollcall/corpus/preprocess.hpp"
#include "rollcall/corpus/vocab.hpp"
#include "rollcall/eval/fixtures.hpp"
#include "rollcall/eval/harness.hpp"
#include "rollcall/eval/linear.hpp"
#include "rollcall/eval/report.hpp"
#include "rollcall/model/config.hpp"
#include "rollcall/model/model.hpp"
#include "rollcall/model/train.hpp"
#include "rollcall/nd/checkpoint.hpp"
#include "rollcall/nd/gradcheck.hpp"
#include "rollcall/synth/synth.hpp"
#include "rollcall/util/io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef ROLLCALL_GIT_SHA
#define ROLLCALL_GIT_SHA "unknown"
#endif
constexpr const char* kTool = "rollcall 1.0.0 (" ROLLCALL_GIT_SHA ")";

// Bad flags and missing input files exit 2; failures inside a run exit 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_input(const fs::path& path, const char* what) {
    if (!fs::exists(path))
        throw UsageError(std::string("missing ") + what + " file: " + path.string());
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("ROLLCALL_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    const std::string s = raw;
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        if (!std::isdigit(static_cast<unsigned char>(s[0]))) throw std::invalid_argument(s);
        value = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("ROLLCALL_SEED must be a non-negative integer, got `" + s + "`");
    }
    if (pos != s.size())
        throw UsageError("ROLLCALL_SEED must be a non-negative integer, got `" + s + "`");
    return static_cast<std::uint64_t>(value);
}

std::vector<std::string> split_csv(const std::string& s, const char* flag) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw UsageError(std::string(flag) + " has an empty list entry");
        out.push_back(item);
    }
    if (out.empty()) throw UsageError(std::string(flag) + " must list at least one entry");
    return out;
}

// Every command records what it ran with: the argv, the effective config
// (environment overrides applied), input fingerprints, and what it wrote.
// Rerunning the argv against the same inputs reproduces the outputs.
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv)
        : start_(std::chrono::steady_clock::now()) {
        j_["manifest_version"] = "rollcall.run.v1";
        j_["tool"] = kTool;
        j_["command"] = std::move(command);
        j_["argv"] = std::move(argv);
        j_["config"] = nullptr;
        j_["seed"] = nullptr;
        j_["inputs"] = json::object();
        j_["outputs"] = json::array();
    }

    void set_config(json config) { j_["config"] = std::move(config); }
    void set_seed(std::uint64_t seed) { j_["seed"] = seed; }
    void add_input(const fs::path& path) {
        j_["inputs"][path.string()] = rollcall::util::hex64(rollcall::util::fnv1a64_file(path));
    }
    void add_output(const fs::path& path) { j_["outputs"].push_back(path.string()); }

    // Written last, next to the command's output: <out_base>.manifest.json.
    void write(const fs::path& out_base) {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        j_["duration_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
        fs::path path = out_base;
        path += ".manifest.json";
        rollcall::util::atomic_write(path, j_.dump(2) + "\n");
    }

private:
    json j_;
    std::chrono::steady_clock::time_point start_;
};

rollcall::model::ModelConfig load_model_config(const fs::path& path) {
    auto cfg = rollcall::model::ModelConfig::from_json(rollcall::util::load_json(path));
    if (auto seed = env_seed()) cfg.seed = *seed;
    cfg.validate();
    return cfg;
}

rollcall::corpus::Vocab full_vocab(const rollcall::corpus::Corpus& corpus) {
    std::vector<const rollcall::corpus::Bill*> bills;
    bills.reserve(corpus.bills.size());
    for (const auto& [ignored, bill] : corpus.bills) bills.push_back(&bill);
    return rollcall::corpus::Vocab::build(bills);
}

std::vector<std::string> legislators_by_row(const rollcall::corpus::Corpus& corpus) {
    std::vector<std::string> ids(corpus.legislators.size());
    for (const auto& [id, leg] : corpus.legislators) ids[leg.row_index] = id;
    return ids;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * fraction);
    return buf;
}

struct IngestOpts {
    std::string bills, legislators, votes, stopwords, out;
};

int run_ingest(const IngestOpts& o, RunManifest manifest) {
    require_input(o.bills, "bills");
    require_input(o.legislators, "legislators");
    require_input(o.votes, "votes");
    require_input(o.stopwords, "stopwords");
    manifest.add_input(o.bills);
    manifest.add_input(o.legislators);
    manifest.add_input(o.votes);
    manifest.add_input(o.stopwords);

    const auto parsed = rollcall::corpus::parse_corpus_files(o.bills, o.legislators, o.votes,
                                                             rollcall::corpus::kCorpusSchemaV1);
    const auto stopwords = rollcall::corpus::StopwordSet::load(o.stopwords);
    const rollcall::corpus::CorpusOptions options;
    const auto corpus = rollcall::corpus::build_corpus(parsed, stopwords, options);
    rollcall::corpus::save_corpus(corpus, o.out);

    std::size_t yes = 0;
    for (const auto& v : corpus.votes) yes += v.outcome ? 1 : 0;
    std::cout << "bills: " << corpus.bills.size() << " ("
              << parsed.bills.size() - corpus.bills.size() << " unanimous dropped)\n"
              << "legislators: " << corpus.legislators.size() << "\n"
              << "votes: " << corpus.votes.size() << " ("
              << parsed.votes.size() - corpus.votes.size() << " on dropped bills removed)\n"
              << "yes_rate: "
              << (corpus.votes.empty()
                      ? std::string("n/a")
                      : percent(static_cast<double>(yes) /
                                static_cast<double>(corpus.votes.size())))
              << "\n"
              << "wrote corpus cache to " << o.out << "\n";

    manifest.set_config(json{{"schema", rollcall::corpus::kCorpusSchemaV1},
                             {"summary_cap", options.summary_cap},
                             {"fulltext_cap", options.fulltext_cap},
                             {"unanimity_threshold", options.unanimity_threshold}});
    manifest.add_output(o.out);
    manifest.write(o.out);
    return 0;
}

struct TrainOpts {
    std::string corpus, model_config, out_checkpoint;
};

int run_train(const TrainOpts& o, RunManifest manifest) {
    require_input(o.corpus, "corpus");
    require_input(o.model_config, "model config");
    manifest.add_input(o.corpus);
    manifest.add_input(o.model_config);

    const auto cfg = load_model_config(o.model_config);
    const auto corpus = rollcall::corpus::load_corpus(o.corpus);
    const auto vocab = full_vocab(corpus);
    const auto data = rollcall::model::make_dataset(corpus, corpus.votes, vocab, cfg);
    auto model = rollcall::model::VoteModel::init(cfg, vocab, corpus.legislators.size());
    const auto history = rollcall::model::train_model(model, data);
    const auto [loss, accuracy] = rollcall::model::evaluate_model(model, data);

    json meta;
    meta["config"] = cfg.to_json();
    meta["legislators"] = legislators_by_row(corpus);
    meta["vocab"] = vocab.token_list();
    meta["corpus_fingerprint"] = rollcall::util::hex64(rollcall::util::fnv1a64_file(o.corpus));
    rollcall::nd::save_checkpoint(model.params(), o.out_checkpoint, meta);

    json hist;
    hist["epochs"] = json::array();
    for (std::size_t i = 0; i < history.epochs.size(); ++i)
        hist["epochs"].push_back(json{{"epoch", i + 1},
                                      {"mean_loss", history.epochs[i].mean_loss},
                                      {"accuracy", history.epochs[i].accuracy}});
    hist["final_loss"] = loss;
    hist["final_accuracy"] = accuracy;
    const fs::path history_path = o.out_checkpoint + ".history.json";
    rollcall::util::atomic_write(history_path, hist.dump(2) + "\n");

    std::cout << "model: " << cfg.model_name() << "\n"
              << "examples: " << data.examples.size() << "\n"
              << "epochs: " << history.epochs.size() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "final_loss: %.6f\ntrain_accuracy: %.4f\n", loss, accuracy);
    std::cout << buf << "wrote checkpoint " << o.out_checkpoint << ".bin\n";

    manifest.set_config(cfg.to_json());
    manifest.set_seed(cfg.seed);
    manifest.add_output(o.out_checkpoint + ".bin");
    manifest.add_output(o.out_checkpoint + ".json");
    manifest.add_output(history_path);
    manifest.write(o.out_checkpoint);
    return 0;
}

struct EvalOpts {
    std::string corpus, model_config, models, protocol, train_sessions, test_sessions, out;
    std::size_t folds = 5;
};

int run_eval(const EvalOpts& o, RunManifest manifest) {
    require_input(o.corpus, "corpus");
    require_input(o.model_config, "model config");
    manifest.add_input(o.corpus);
    manifest.add_input(o.model_config);

    const bool in_session = o.protocol == "in-session";
    if (!in_session && o.protocol != "out-of-session")
        throw UsageError("--protocol must be `in-session` or `out-of-session`, got `" +
                         o.protocol + "`");

    std::set<std::string> train_sessions;
    std::vector<std::set<std::string>> test_blocks;
    if (in_session) {
        if (o.folds < 2) throw UsageError("--folds must be at least 2");
        if (!o.train_sessions.empty() || !o.test_sessions.empty())
            throw UsageError("session lists apply to the out-of-session protocol only");
    } else {
        if (o.train_sessions.empty() || o.test_sessions.empty())
            throw UsageError(
                "out-of-session evaluation needs --train-sessions and --test-sessions");
        for (const auto& s : split_csv(o.train_sessions, "--train-sessions"))
            train_sessions.insert(s);
        for (const auto& s : split_csv(o.test_sessions, "--test-sessions"))
            test_blocks.push_back({s});
    }

    const auto names = split_csv(o.models, "--models");
    const auto base = load_model_config(o.model_config);
    std::vector<rollcall::model::ModelConfig> variants;  // parallel to names
    variants.reserve(names.size());
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) throw UsageError("duplicate model name `" + name + "`");
        if (name == "guess_yes" || name == "linear") {
            variants.push_back(base);
            continue;
        }
        try {
            variants.push_back(rollcall::eval::variant_config(base, name));
        } catch (const std::runtime_error& e) {
            throw UsageError(e.what());
        }
    }

    const auto corpus = rollcall::corpus::load_corpus(o.corpus);
    std::vector<rollcall::eval::EvalResult> results;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& name = names[i];
        const auto& cfg = variants[i];
        if (name == "guess_yes") {
            if (in_session)
                results.push_back(rollcall::eval::guess_yes_in_session(corpus, o.folds));
            else
                for (auto& r : rollcall::eval::guess_yes_out_of_session(corpus, train_sessions,
                                                                        test_blocks))
                    results.push_back(std::move(r));
        } else if (name == "linear") {
            if (in_session)
                results.push_back(
                    rollcall::eval::run_in_session_cv_linear(corpus, cfg, o.folds, cfg.seed));
            else
                for (auto& r : rollcall::eval::run_out_of_session_linear(corpus, cfg,
                                                                         train_sessions,
                                                                         test_blocks))
                    results.push_back(std::move(r));
        } else {
            if (in_session)
                results.push_back(
                    rollcall::eval::run_in_session_cv(corpus, cfg, o.folds, cfg.seed));
            else
                for (auto& r :
                     rollcall::eval::run_out_of_session(corpus, cfg, train_sessions, test_blocks))
                    results.push_back(std::move(r));
        }
    }

    rollcall::eval::write_reports(results, o.out);
    rollcall::eval::sort_results(results);
    std::cout << rollcall::eval::to_table(results);

    json cfg_snapshot;
    cfg_snapshot["base"] = base.to_json();
    cfg_snapshot["models"] = names;
    cfg_snapshot["protocol"] = o.protocol;
    if (in_session) {
        cfg_snapshot["folds"] = o.folds;
    } else {
        cfg_snapshot["train_sessions"] = json(train_sessions);
        cfg_snapshot["test_sessions"] = json::array();
        for (const auto& block : test_blocks)
            cfg_snapshot["test_sessions"].push_back(*block.begin());
    }
    manifest.set_config(std::move(cfg_snapshot));
    manifest.set_seed(base.seed);
    manifest.add_output(o.out + ".csv");
    manifest.add_output(o.out + ".txt");
    manifest.add_output(o.out + ".json");
    manifest.write(o.out);
    return 0;
}

struct SynthOpts {
    std::string spec, out;
};

int run_synth(const SynthOpts& o, RunManifest manifest) {
    require_input(o.spec, "spec");
    manifest.add_input(o.spec);

    auto spec = rollcall::synth::SynthSpec::from_json(rollcall::util::load_json(o.spec));
    if (auto seed = env_seed()) spec.seed = *seed;
    spec.validate();
    rollcall::synth::generate_corpus_files(spec, o.out);

    const std::size_t legislators = 2 * spec.legislators_per_party;
    const std::size_t bills = spec.sessions.size() * spec.bills_per_session;
    std::cout << "sessions: " << spec.sessions.size() << "\n"
              << "bills: " << bills << "\n"
              << "legislators: " << legislators << "\n"
              << "votes: " << bills * legislators << "\n"
              << "wrote synthetic corpus to " << o.out << "\n";

    manifest.set_config(spec.to_json());
    manifest.set_seed(spec.seed);
    for (const char* name : {"bills.jsonl", "legislators.jsonl", "votes.jsonl"})
        manifest.add_output(fs::path(o.out) / name);
    manifest.write(o.out);
    return 0;
}

struct GradcheckOpts {
    std::string model_config;
    std::string out = "gradcheck";
    bool sabotage = false;
};

int run_gradcheck(const GradcheckOpts& o, RunManifest manifest) {
    require_input(o.model_config, "model config");
    manifest.add_input(o.model_config);

    const auto cfg = load_model_config(o.model_config);
    const auto corpus = rollcall::eval::micro_corpus();
    const auto vocab = full_vocab(corpus);
    const auto data = rollcall::model::make_dataset(corpus, corpus.votes, vocab, cfg);
    auto model = rollcall::model::VoteModel::init(cfg, vocab, corpus.legislators.size());

    const double scale = 1.0 / static_cast<double>(data.examples.size());
    auto grads = model.params().zero_grads();
    for (const auto& ex : data.examples)
        model.forward_backward(data.bills[ex.bill], ex.leg_row, ex.label, scale, grads);
    if (o.sabotage) grads.at("score.w").data()[0] += 0.5;

    auto loss = [&](const rollcall::nd::ParamStore& p) {
        auto probe = model;
        probe.params() = p;
        return rollcall::model::evaluate_model(probe, data).first;
    };
    constexpr double kEps = 1e-4;
    constexpr double kTolerance = 1e-3;
    const auto report = rollcall::nd::grad_check(loss, model.params(), grads, kEps, kTolerance);

    char buf[64];
    std::snprintf(buf, sizeof buf, "max_rel_err: %.3e\ntolerance: %.1e\n", report.max_rel_err,
                  report.tolerance);
    std::cout << "model: " << cfg.model_name() << "\n"
              << "coordinates: " << report.coords_checked << "\n"
              << buf << "gradcheck: " << (report.pass() ? "PASS" : "FAIL") << "\n";
    if (!report.pass())
        std::cout << "worst: " << report.worst.param << "[" << report.worst.index
                  << "] analytic " << report.worst.analytic << " vs numeric "
                  << report.worst.numeric << "\n";

    manifest.set_config(json{{"model", cfg.to_json()},
                             {"eps", kEps},
                             {"tolerance", kTolerance},
                             {"sabotage", o.sabotage}});
    manifest.set_seed(cfg.seed);
    manifest.write(o.out);
    return report.pass() ? 0 : 1;
}

struct ReportOpts {
    std::string results, out;
};

int run_report(const ReportOpts& o, RunManifest manifest) {
    require_input(o.results, "results");
    manifest.add_input(o.results);

    const json j = rollcall::util::load_json(o.results);
    if (!j.is_array()) throw std::runtime_error("results file must hold a JSON array");
    std::vector<rollcall::eval::EvalResult> results;
    for (const auto& row : j) {
        rollcall::eval::EvalResult r;
        r.model = row.at("model").get<std::string>();
        r.setting = row.at("setting").get<std::string>();
        r.split = row.at("split").get<std::string>();
        r.votes = row.at("votes").get<std::size_t>();
        r.accuracy = row.at("accuracy").get<double>();
        results.push_back(std::move(r));
    }

    rollcall::eval::write_reports(results, o.out);
    rollcall::eval::sort_results(results);
    std::cout << rollcall::eval::to_table(results);

    manifest.set_config(json{{"rows", results.size()}});
    manifest.add_output(o.out + ".csv");
    manifest.add_output(o.out + ".txt");
    manifest.add_output(o.out + ".json");
    manifest.write(o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kTool) + " - roll-call vote prediction toolkit"};
    app.require_subcommand(1);
    std::vector<std::string> raw_argv(argv + 1, argv + argc);

    IngestOpts ingest;
    auto* cmd_ingest = app.add_subcommand(
        "ingest", "Parse raw JSONL files into a processed corpus cache");
    cmd_ingest->add_option("--bills", ingest.bills, "bills.jsonl path")->required();
    cmd_ingest->add_option("--legislators", ingest.legislators, "legislators.jsonl path")
        ->required();
    cmd_ingest->add_option("--votes", ingest.votes, "votes.jsonl path")->required();
    cmd_ingest->add_option("--stopwords", ingest.stopwords, "stopword list, one per line")
        ->required();
    cmd_ingest->add_option("--out", ingest.out, "corpus cache to write")->required();

    TrainOpts train;
    auto* cmd_train =
        app.add_subcommand("train", "Train one model on a corpus cache and checkpoint it");
    cmd_train->add_option("--corpus", train.corpus, "corpus cache from ingest")->required();
    cmd_train->add_option("--model-config", train.model_config, "model config JSON")->required();
    cmd_train
        ->add_option("--out-checkpoint", train.out_checkpoint,
                     "checkpoint prefix (writes <prefix>.bin/.json)")
        ->required();

    EvalOpts eval;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate model variants under a protocol");
    cmd_eval->add_option("--corpus", eval.corpus, "corpus cache from ingest")->required();
    cmd_eval->add_option("--model-config", eval.model_config, "shared hyperparameter JSON")
        ->required();
    cmd_eval->add_option("--models", eval.models,
                         "comma list: mwe, cnn, mwe_meta, cnn_meta, meta_only (optionally "
                         "_ft), linear, guess_yes")
        ->required();
    cmd_eval->add_option("--protocol", eval.protocol, "in-session or out-of-session")->required();
    cmd_eval->add_option("--folds", eval.folds, "cross-validation folds (in-session)");
    cmd_eval->add_option("--train-sessions", eval.train_sessions,
                         "comma list of training sessions (out-of-session)");
    cmd_eval->add_option("--test-sessions", eval.test_sessions,
                         "comma list of test sessions, one block each (out-of-session)");
    cmd_eval->add_option("--out", eval.out, "report base path (writes .csv/.txt/.json)")
        ->required();

    SynthOpts synth;
    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic JSONL corpus");
    cmd_synth->add_option("--spec", synth.spec, "synthesis spec JSON")->required();
    cmd_synth->add_option("--out", synth.out, "output directory")->required();

    GradcheckOpts gradcheck;
    auto* cmd_gradcheck = app.add_subcommand(
        "gradcheck", "Finite-difference check of every gradient on a built-in micro instance");
    cmd_gradcheck->add_option("--model-config", gradcheck.model_config, "model config JSON")
        ->required();
    cmd_gradcheck->add_option("--out", gradcheck.out, "manifest base path");
    cmd_gradcheck->add_flag("--sabotage", gradcheck.sabotage,
                            "negative control: corrupt one analytic gradient first");

    ReportOpts report;
    auto* cmd_report =
        app.add_subcommand("report", "Re-render report files from an eval JSON report");
    cmd_report->add_option("--results", report.results, "eval .json report")->required();
    cmd_report->add_option("--out", report.out, "report base path (writes .csv/.txt/.json)")
        ->required();

    int rc = 0;
    cmd_ingest->callback([&] { rc = run_ingest(ingest, RunManifest("ingest", raw_argv)); });
    cmd_train->callback([&] { rc = run_train(train, RunManifest("train", raw_argv)); });
    cmd_eval->callback([&] { rc = run_eval(eval, RunManifest("eval", raw_argv)); });
    cmd_synth->callback([&] { rc = run_synth(synth, RunManifest("synth", raw_argv)); });
    cmd_gradcheck->callback(
        [&] { rc = run_gradcheck(gradcheck, RunManifest("gradcheck", raw_argv)); });
    cmd_report->callback([&] { rc = run_report(report, RunManifest("report", raw_argv)); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
