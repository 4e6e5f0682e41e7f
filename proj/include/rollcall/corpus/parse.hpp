#pragma once

#include <filesystem>
#include <vector>

#include "rollcall/corpus/types.hpp"

namespace rollcall::corpus {

inline constexpr const char* kCorpusSchemaV1 = "rollcall.corpus.v1";

struct ParsedFiles {
    std::vector<RawBill> bills;
    std::vector<Legislator> legislators;
    std::vector<VoteRecord> votes;
};

// Reads bills.jsonl, legislators.jsonl and votes.jsonl from `dir`. Every
// error names the file and 1-based line it came from. Rejects duplicate
// bill/legislator ids, duplicate (bill, legislator) vote pairs, and votes or
// sponsor lists that reference ids not present in the files.
ParsedFiles parse_corpus(const std::filesystem::path& dir, const std::string& schema_version);

// Same contract with the three files named individually.
ParsedFiles parse_corpus_files(const std::filesystem::path& bills_path,
                               const std::filesystem::path& legislators_path,
                               const std::filesystem::path& votes_path,
                               const std::string& schema_version);

}  // namespace rollcall::corpus
