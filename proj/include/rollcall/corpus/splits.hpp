#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rollcall/corpus/types.hpp"

namespace rollcall::corpus {

// Cross-validation folds over bills, stratified by session: within each
// session the bills are shuffled and dealt round-robin, so per-session fold
// counts differ by at most one. Votes follow their bill's fold.
std::map<std::string, std::size_t> make_folds(const Corpus& corpus, std::size_t k,
                                              std::uint64_t seed);

struct SessionSplit {
    std::vector<VoteRecord> train;
    std::vector<VoteRecord> test;
    std::set<std::string> train_bills;
    std::set<std::string> test_bills;
    std::size_t dropped_test_votes = 0;  // votes by legislators unseen in training
    bool empty_test = false;
};

// Train on whole sessions, test on later ones. Test votes by legislators
// with no training vote are dropped (their embeddings would be untrained).
SessionSplit out_of_session_split(const Corpus& corpus,
                                  const std::set<std::string>& train_sessions,
                                  const std::set<std::string>& test_sessions);

}  // namespace rollcall::corpus
