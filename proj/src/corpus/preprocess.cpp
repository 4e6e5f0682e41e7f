#include "rollcall/corpus/preprocess.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace rollcall::corpus {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isalnum(ch)) {
            cur.push_back(static_cast<char>(std::tolower(ch)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file " + path.string());
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n' || line.back() == ' '))
            line.pop_back();
        if (!line.empty()) set.words_.insert(line);
    }
    return set;
}

StopwordSet StopwordSet::from_tokens(std::vector<std::string> tokens) {
    StopwordSet set;
    for (auto& t : tokens) set.words_.insert(std::move(t));
    return set;
}

std::vector<std::string> preprocess_text(const std::string& raw, const StopwordSet& stopwords,
                                         std::size_t cap) {
    if (cap == 0) throw std::runtime_error("preprocess_text: cap must be positive");
    std::vector<std::string> out;
    for (auto& tok : tokenize(raw)) {
        if (stopwords.contains(tok)) continue;
        out.push_back(std::move(tok));
        if (out.size() == cap) break;
    }
    return out;
}

}  // namespace rollcall::corpus
