#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rollcall::corpus {

enum class Chamber { house, senate };
enum class Party { rep, dem, ind };

Chamber parse_chamber(const std::string& s);
Party parse_party(const std::string& s);
std::string to_string(Chamber c);
std::string to_string(Party p);

// Record as it appears in bills.jsonl, before any preprocessing.
struct RawBill {
    std::string bill_id;
    std::string session;
    Chamber chamber = Chamber::house;
    std::string title;
    std::string summary_text;
    std::string fulltext;  // optional in the input; empty when absent
    std::vector<std::string> sponsor_ids;
};

struct Legislator {
    std::string legislator_id;
    Party party = Party::ind;
    Chamber chamber = Chamber::house;
    std::size_t row_index = 0;  // dense bijection onto 0..num_legislators-1
};

struct VoteRecord {
    std::string bill_id;
    std::string legislator_id;
    int outcome = 0;  // yes=1, no=0
};

// Preprocessed bill. Tokens are stored as strings (lowercased, stopwords
// removed, truncated); vocabulary indices are assigned per experiment from
// that experiment's training partition, so the corpus itself never fixes an
// index space that could leak test tokens.
struct Bill {
    std::string bill_id;
    std::string session;
    std::vector<std::string> summary_tokens;   // length <= summary cap
    std::vector<std::string> fulltext_tokens;  // length <= fulltext cap
    double p_r = 0.0;
    double p_d = 0.0;
};

struct Corpus {
    std::map<std::string, Bill> bills;
    std::map<std::string, Legislator> legislators;
    std::vector<VoteRecord> votes;
    std::map<std::string, std::vector<std::string>> session_bills;  // sorted bill ids
};

}  // namespace rollcall::corpus
