#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rollcall/corpus/types.hpp"

namespace rollcall::synth {

struct SynthSession {
    std::string label;
    corpus::Party majority = corpus::Party::rep;
};

// Generative knobs for synthetic roll-call corpora. Topics are visible in
// the text (each topic has a private vocabulary); ideology is carried by
// sponsorship; the topic-to-polarity map can flip when the majority changes.
struct SynthSpec {
    std::vector<SynthSession> sessions;
    std::size_t topics = 8;
    std::size_t legislators_per_party = 10;
    std::size_t bills_per_session = 100;
    double sponsor_majority_prob = 0.75;
    std::size_t topic_vocab_size = 20;
    double vote_noise = 0.0;
    bool flip_topic_polarity_on_majority_change = true;
    std::uint64_t seed = 1;

    // Number of topics owned by the session's majority party.
    std::size_t majority_topics() const;

    static SynthSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

// Per-session tables. owner[t] is the party that sponsors every bill of
// topic t that session; polarity[t] in {-1,+1} is the side the topic's
// bills take (+1 passes with republican ideal points).
struct SessionTables {
    std::vector<corpus::Party> owner;
    std::vector<int> polarity;
};

// One table per spec session, deterministic in spec.seed. Consecutive
// sessions with the same majority share identical tables; on a majority
// change the minimum number of topics moves to the new majority, and
// polarity follows ownership only when the flip switch is on.
std::vector<SessionTables> build_tables(const SynthSpec& spec);

// Writes bills.jsonl, legislators.jsonl, and votes.jsonl into out_dir
// (creating it), in the exact schema the ingestion parser reads.
// Same spec and seed give byte-identical files.
void generate_corpus_files(const SynthSpec& spec, const std::filesystem::path& out_dir);

struct OraclePair {
    double text_only = 0.0;
    double with_sponsor = 0.0;
};

// Bayes-optimal accuracies for a predictor fit on the bills of one session
// and applied to another, keyed by (train label, test label); the diagonal
// holds the in-session ceilings. Computed by enumerating the tables.
std::map<std::pair<std::string, std::string>, OraclePair> oracle_accuracies(const SynthSpec& spec);

}  // namespace rollcall::synth
