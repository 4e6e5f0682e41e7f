#include "rollcall/corpus/corpus.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "rollcall/util/io.hpp"

namespace rollcall::corpus {

using nlohmann::json;

std::map<std::string, VoteTally> tally_votes(const std::vector<VoteRecord>& votes) {
    std::map<std::string, VoteTally> tallies;
    for (const auto& v : votes) {
        auto& t = tallies[v.bill_id];
        if (v.outcome == 1)
            ++t.yes;
        else
            ++t.no;
    }
    return tallies;
}

std::set<std::string> filter_unanimous(const std::vector<RawBill>& bills,
                                       const std::map<std::string, VoteTally>& tallies,
                                       double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::runtime_error("unanimity threshold must lie in (0, 1)");
    std::set<std::string> retained;
    for (const auto& b : bills) {
        auto it = tallies.find(b.bill_id);
        if (it == tallies.end() || it->second.total() == 0)
            throw std::runtime_error("bill " + b.bill_id + " has no votes");
        const auto& t = it->second;
        const double no_frac = static_cast<double>(t.no) / static_cast<double>(t.total());
        if (no_frac >= threshold) retained.insert(b.bill_id);
    }
    return retained;
}

std::pair<double, double> compute_sponsor_fractions(
    const std::vector<std::string>& sponsor_ids,
    const std::map<std::string, Legislator>& legislators) {
    if (sponsor_ids.empty()) return {0.0, 0.0};
    std::size_t r = 0, d = 0;
    for (const auto& sid : sponsor_ids) {
        auto it = legislators.find(sid);
        if (it == legislators.end())
            throw std::runtime_error("unknown sponsor id `" + sid + "`");
        if (it->second.party == Party::rep) ++r;
        if (it->second.party == Party::dem) ++d;
    }
    const double n = static_cast<double>(sponsor_ids.size());
    return {static_cast<double>(r) / n, static_cast<double>(d) / n};
}

Corpus build_corpus(const ParsedFiles& parsed, const StopwordSet& stopwords,
                    const CorpusOptions& options) {
    Corpus corpus;
    for (const auto& l : parsed.legislators) corpus.legislators.emplace(l.legislator_id, l);
    std::size_t row = 0;
    for (auto& [id, leg] : corpus.legislators) leg.row_index = row++;

    const auto tallies = tally_votes(parsed.votes);
    const auto retained = filter_unanimous(parsed.bills, tallies, options.unanimity_threshold);

    for (const auto& raw : parsed.bills) {
        if (!retained.count(raw.bill_id)) continue;
        Bill b;
        b.bill_id = raw.bill_id;
        b.session = raw.session;
        b.summary_tokens = preprocess_text(raw.summary_text, stopwords, options.summary_cap);
        b.fulltext_tokens = raw.fulltext.empty()
                                ? std::vector<std::string>{}
                                : preprocess_text(raw.fulltext, stopwords, options.fulltext_cap);
        std::tie(b.p_r, b.p_d) = compute_sponsor_fractions(raw.sponsor_ids, corpus.legislators);
        corpus.session_bills[b.session].push_back(b.bill_id);
        corpus.bills.emplace(raw.bill_id, std::move(b));
    }
    for (auto& [session, ids] : corpus.session_bills) std::sort(ids.begin(), ids.end());

    for (const auto& v : parsed.votes)
        if (retained.count(v.bill_id)) corpus.votes.push_back(v);
    std::sort(corpus.votes.begin(), corpus.votes.end(), [](const auto& a, const auto& b) {
        return std::tie(a.bill_id, a.legislator_id) < std::tie(b.bill_id, b.legislator_id);
    });

    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    json bills = json::array();
    for (const auto& [id, b] : corpus.bills) {
        bills.push_back({{"bill_id", b.bill_id},
                         {"session", b.session},
                         {"summary_tokens", b.summary_tokens},
                         {"fulltext_tokens", b.fulltext_tokens},
                         {"p_r", b.p_r},
                         {"p_d", b.p_d}});
    }
    json legs = json::array();
    for (const auto& [id, l] : corpus.legislators) {
        legs.push_back({{"legislator_id", l.legislator_id},
                        {"party", to_string(l.party)},
                        {"chamber", to_string(l.chamber)}});
    }
    json votes = json::array();
    for (const auto& v : corpus.votes) {
        votes.push_back(
            {{"bill_id", v.bill_id}, {"legislator_id", v.legislator_id}, {"outcome", v.outcome}});
    }
    json doc{{"schema", kCorpusSchemaV1},
             {"bills", std::move(bills)},
             {"legislators", std::move(legs)},
             {"votes", std::move(votes)}};
    util::atomic_write(path, doc.dump(2) + "\n");
}

Corpus load_corpus(const std::filesystem::path& path) {
    const json doc = util::load_json(path);
    if (!doc.contains("schema") || doc.at("schema") != kCorpusSchemaV1)
        throw std::runtime_error("corpus cache " + path.string() + " has unsupported schema");
    Corpus corpus;
    for (const auto& j : doc.at("legislators")) {
        Legislator l;
        l.legislator_id = j.at("legislator_id").get<std::string>();
        l.party = parse_party(j.at("party").get<std::string>());
        l.chamber = parse_chamber(j.at("chamber").get<std::string>());
        corpus.legislators.emplace(l.legislator_id, l);
    }
    std::size_t row = 0;
    for (auto& [id, leg] : corpus.legislators) leg.row_index = row++;

    for (const auto& j : doc.at("bills")) {
        Bill b;
        b.bill_id = j.at("bill_id").get<std::string>();
        b.session = j.at("session").get<std::string>();
        b.summary_tokens = j.at("summary_tokens").get<std::vector<std::string>>();
        b.fulltext_tokens = j.at("fulltext_tokens").get<std::vector<std::string>>();
        b.p_r = j.at("p_r").get<double>();
        b.p_d = j.at("p_d").get<double>();
        corpus.session_bills[b.session].push_back(b.bill_id);
        corpus.bills.emplace(b.bill_id, std::move(b));
    }
    for (auto& [session, ids] : corpus.session_bills) std::sort(ids.begin(), ids.end());

    for (const auto& j : doc.at("votes")) {
        VoteRecord v;
        v.bill_id = j.at("bill_id").get<std::string>();
        v.legislator_id = j.at("legislator_id").get<std::string>();
        v.outcome = j.at("outcome").get<int>();
        if (!corpus.bills.count(v.bill_id) || !corpus.legislators.count(v.legislator_id))
            throw std::runtime_error("corpus cache has dangling vote reference");
        corpus.votes.push_back(std::move(v));
    }
    return corpus;
}

}  // namespace rollcall::corpus
