#include "rollcall/corpus/splits.hpp"

#include <stdexcept>

#include "rollcall/nd/rng.hpp"

namespace rollcall::corpus {

std::map<std::string, std::size_t> make_folds(const Corpus& corpus, std::size_t k,
                                              std::uint64_t seed) {
    if (k < 2) throw std::runtime_error("make_folds: k must be at least 2");
    nd::Rng rng(seed);
    std::map<std::string, std::size_t> folds;
    for (const auto& [session, ids] : corpus.session_bills) {
        if (ids.size() < k)
            throw std::runtime_error("session " + session + " has " + std::to_string(ids.size()) +
                                     " bills, fewer than k=" + std::to_string(k));
        std::vector<std::string> shuffled = ids;
        rng.shuffle(shuffled);
        const std::size_t start = rng.below(k);
        for (std::size_t i = 0; i < shuffled.size(); ++i)
            folds[shuffled[i]] = (start + i) % k;
    }
    return folds;
}

SessionSplit out_of_session_split(const Corpus& corpus,
                                  const std::set<std::string>& train_sessions,
                                  const std::set<std::string>& test_sessions) {
    if (train_sessions.empty() || test_sessions.empty())
        throw std::runtime_error("out_of_session_split: both session sets must be nonempty");
    for (const auto& s : train_sessions)
        if (test_sessions.count(s))
            throw std::runtime_error("session " + s + " appears in both train and test sets");

    SessionSplit split;
    for (const auto& [id, bill] : corpus.bills) {
        if (train_sessions.count(bill.session)) split.train_bills.insert(id);
        if (test_sessions.count(bill.session)) split.test_bills.insert(id);
    }

    std::set<std::string> train_legs;
    for (const auto& v : corpus.votes) {
        if (split.train_bills.count(v.bill_id)) {
            split.train.push_back(v);
            train_legs.insert(v.legislator_id);
        }
    }
    for (const auto& v : corpus.votes) {
        if (!split.test_bills.count(v.bill_id)) continue;
        if (train_legs.count(v.legislator_id))
            split.test.push_back(v);
        else
            ++split.dropped_test_votes;
    }
    split.empty_test = split.test.empty();
    return split;
}

}  // namespace rollcall::corpus
