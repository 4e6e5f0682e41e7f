#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rollcall/corpus/parse.hpp"
#include "rollcall/corpus/preprocess.hpp"
#include "rollcall/corpus/types.hpp"

namespace rollcall::corpus {

struct CorpusOptions {
    std::size_t summary_cap = 400;
    std::size_t fulltext_cap = 2000;
    double unanimity_threshold = 0.01;
};

struct VoteTally {
    std::size_t yes = 0;
    std::size_t no = 0;
    std::size_t total() const { return yes + no; }
};

std::map<std::string, VoteTally> tally_votes(const std::vector<VoteRecord>& votes);

// A bill survives iff no_votes / total_votes >= threshold. A bill with no
// votes at all cannot be classified and is an error.
std::set<std::string> filter_unanimous(const std::vector<RawBill>& bills,
                                       const std::map<std::string, VoteTally>& tallies,
                                       double threshold);

// p_r = |R sponsors| / |sponsors|, p_d likewise; independents count in the
// denominator only. An empty sponsor list yields (0, 0).
std::pair<double, double> compute_sponsor_fractions(
    const std::vector<std::string>& sponsor_ids,
    const std::map<std::string, Legislator>& legislators);

// Filtering, preprocessing, sponsor fractions, dense legislator row indices
// (sorted id order) and the per-session bill index, in one deterministic pass.
Corpus build_corpus(const ParsedFiles& parsed, const StopwordSet& stopwords,
                    const CorpusOptions& options);

// Processed-corpus cache (JSON, schema-versioned). Serialization is sorted,
// so equal corpora produce identical bytes.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace rollcall::corpus
