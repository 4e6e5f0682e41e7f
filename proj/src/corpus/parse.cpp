#include "rollcall/corpus/parse.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rollcall::corpus {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line,
                       const std::string& what) {
    std::ostringstream os;
    os << file.filename().string() << ":" << line << ": " << what;
    throw std::runtime_error(os.str());
}

// Applies `fn` to each non-empty line parsed as a JSON object.
template <class Fn>
void for_each_record(const std::filesystem::path& file, Fn fn) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(file, lineno, std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object()) fail(file, lineno, "expected a JSON object");
        fn(j, lineno);
    }
}

std::string need_string(const json& j, const char* key, const std::filesystem::path& file,
                        std::size_t line) {
    if (!j.contains(key)) fail(file, line, std::string("missing field `") + key + "`");
    if (!j.at(key).is_string()) fail(file, line, std::string("field `") + key + "` must be a string");
    return j.at(key).get<std::string>();
}

}  // namespace

Chamber parse_chamber(const std::string& s) {
    if (s == "house") return Chamber::house;
    if (s == "senate") return Chamber::senate;
    throw std::runtime_error("unknown chamber: " + s);
}

Party parse_party(const std::string& s) {
    if (s == "R") return Party::rep;
    if (s == "D") return Party::dem;
    if (s == "I") return Party::ind;
    throw std::runtime_error("unknown party: " + s);
}

std::string to_string(Chamber c) { return c == Chamber::house ? "house" : "senate"; }

std::string to_string(Party p) {
    switch (p) {
        case Party::rep: return "R";
        case Party::dem: return "D";
        default: return "I";
    }
}

ParsedFiles parse_corpus(const std::filesystem::path& dir, const std::string& schema_version) {
    return parse_corpus_files(dir / "bills.jsonl", dir / "legislators.jsonl",
                              dir / "votes.jsonl", schema_version);
}

ParsedFiles parse_corpus_files(const std::filesystem::path& bills_path,
                               const std::filesystem::path& legislators_path,
                               const std::filesystem::path& votes_path,
                               const std::string& schema_version) {
    if (schema_version != kCorpusSchemaV1)
        throw std::runtime_error("unsupported corpus schema: " + schema_version);

    ParsedFiles out;
    std::set<std::string> bill_ids, leg_ids;
    std::set<std::pair<std::string, std::string>> vote_keys;

    for_each_record(bills_path, [&](const json& j, std::size_t line) {
        RawBill b;
        b.bill_id = need_string(j, "bill_id", bills_path, line);
        b.session = need_string(j, "session", bills_path, line);
        try {
            b.chamber = parse_chamber(need_string(j, "chamber", bills_path, line));
        } catch (const std::runtime_error& e) {
            fail(bills_path, line, e.what());
        }
        b.title = need_string(j, "title", bills_path, line);
        b.summary_text = need_string(j, "summary_text", bills_path, line);
        if (j.contains("fulltext")) {
            if (!j.at("fulltext").is_string())
                fail(bills_path, line, "field `fulltext` must be a string");
            b.fulltext = j.at("fulltext").get<std::string>();
        }
        if (!j.contains("sponsor_ids") || !j.at("sponsor_ids").is_array())
            fail(bills_path, line, "missing or non-array field `sponsor_ids`");
        for (const auto& s : j.at("sponsor_ids")) {
            if (!s.is_string()) fail(bills_path, line, "sponsor_ids entries must be strings");
            b.sponsor_ids.push_back(s.get<std::string>());
        }
        if (!bill_ids.insert(b.bill_id).second)
            fail(bills_path, line, "duplicate bill_id `" + b.bill_id + "`");
        out.bills.push_back(std::move(b));
    });

    const auto& legs_path = legislators_path;
    for_each_record(legs_path, [&](const json& j, std::size_t line) {
        Legislator l;
        l.legislator_id = need_string(j, "legislator_id", legs_path, line);
        try {
            l.party = parse_party(need_string(j, "party", legs_path, line));
            l.chamber = parse_chamber(need_string(j, "chamber", legs_path, line));
        } catch (const std::runtime_error& e) {
            fail(legs_path, line, e.what());
        }
        if (!leg_ids.insert(l.legislator_id).second)
            fail(legs_path, line, "duplicate legislator_id `" + l.legislator_id + "`");
        out.legislators.push_back(std::move(l));
    });

    for_each_record(votes_path, [&](const json& j, std::size_t line) {
        VoteRecord v;
        v.bill_id = need_string(j, "bill_id", votes_path, line);
        v.legislator_id = need_string(j, "legislator_id", votes_path, line);
        const std::string outcome = need_string(j, "outcome", votes_path, line);
        if (outcome == "yes")
            v.outcome = 1;
        else if (outcome == "no")
            v.outcome = 0;
        else
            fail(votes_path, line, "outcome must be \"yes\" or \"no\", got `" + outcome + "`");
        if (!bill_ids.count(v.bill_id))
            fail(votes_path, line, "vote references unknown bill `" + v.bill_id + "`");
        if (!leg_ids.count(v.legislator_id))
            fail(votes_path, line, "vote references unknown legislator `" + v.legislator_id + "`");
        if (!vote_keys.emplace(v.bill_id, v.legislator_id).second)
            fail(votes_path, line,
                 "duplicate vote for (" + v.bill_id + ", " + v.legislator_id + ")");
        out.votes.push_back(std::move(v));
    });

    for (const auto& b : out.bills)
        for (const auto& sid : b.sponsor_ids)
            if (!leg_ids.count(sid))
                throw std::runtime_error("bill " + b.bill_id + " references unknown sponsor `" +
                                         sid + "`");

    return out;
}

}  // namespace rollcall::corpus
