#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace rollcall::corpus {

// Lowercases ASCII letters and splits on maximal runs of non-alphanumeric
// bytes, so "H.R. 1044--2nd" becomes ["h", "r", "1044", "2nd"].
std::vector<std::string> tokenize(const std::string& text);

class StopwordSet {
public:
    StopwordSet() = default;
    // One token per line; blank lines ignored.
    static StopwordSet load(const std::filesystem::path& path);
    static StopwordSet from_tokens(std::vector<std::string> tokens);

    bool contains(const std::string& token) const { return words_.count(token) > 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

// tokenize, drop stopwords, then keep the FIRST `cap` surviving tokens.
// Removal runs before truncation so the cap is spent on content words.
std::vector<std::string> preprocess_text(const std::string& raw, const StopwordSet& stopwords,
                                         std::size_t cap);

}  // namespace rollcall::corpus
