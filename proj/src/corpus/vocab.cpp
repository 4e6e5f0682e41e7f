#include "rollcall/corpus/vocab.hpp"

#include <set>
#include <stdexcept>

namespace rollcall::corpus {

Vocab Vocab::build(const std::vector<const Bill*>& train_bills) {
    std::set<std::string> tokens;
    for (const Bill* b : train_bills) {
        tokens.insert(b->summary_tokens.begin(), b->summary_tokens.end());
        tokens.insert(b->fulltext_tokens.begin(), b->fulltext_tokens.end());
    }
    Vocab v;
    for (const auto& t : tokens) v.index_.emplace(t, v.next_++);
    return v;
}

std::uint32_t Vocab::lookup(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kOov : it->second;
}

std::vector<std::uint32_t> Vocab::lookup_all(const std::vector<std::string>& tokens) const {
    std::vector<std::uint32_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(lookup(t));
    return out;
}

std::vector<std::string> Vocab::token_list() const {
    std::vector<std::string> out(index_.size());
    for (const auto& [token, index] : index_) out[index - 2] = token;
    return out;
}

Vocab Vocab::from_token_list(const std::vector<std::string>& tokens) {
    Vocab v;
    for (const auto& t : tokens) {
        if (!v.index_.emplace(t, v.next_).second)
            throw std::runtime_error("duplicate vocabulary token `" + t + "`");
        ++v.next_;
    }
    return v;
}

}  // namespace rollcall::corpus
