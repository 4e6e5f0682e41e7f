#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rollcall/corpus/types.hpp"

namespace rollcall::corpus {

// Token index space for one experiment. Index 0 is the padding row (its
// embedding is pinned to zero and never updated), index 1 is out-of-
// vocabulary; real tokens start at 2 in sorted order, which makes the
// assignment a pure function of the training token set.
class Vocab {
public:
    static constexpr std::uint32_t kPad = 0;
    static constexpr std::uint32_t kOov = 1;

    // Collects every summary and fulltext token of the given bills. Call
    // with the training partition only; test-only tokens then hit kOov.
    static Vocab build(const std::vector<const Bill*>& train_bills);

    std::uint32_t lookup(const std::string& token) const;
    bool contains(const std::string& token) const { return index_.count(token) > 0; }
    std::vector<std::uint32_t> lookup_all(const std::vector<std::string>& tokens) const;

    // Total number of indices including pad and OOV (= embedding row count).
    std::uint32_t size() const { return next_; }

    const std::map<std::string, std::uint32_t>& entries() const { return index_; }

    // Tokens in index order (index 2 first); round-trips through
    // from_token_list, which is how checkpoints persist the vocabulary.
    std::vector<std::string> token_list() const;
    static Vocab from_token_list(const std::vector<std::string>& tokens);

private:
    std::map<std::string, std::uint32_t> index_;
    std::uint32_t next_ = 2;
};

}  // namespace rollcall::corpus
