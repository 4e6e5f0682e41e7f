#include "rollcall/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rollcall/nd/rng.hpp"
#include "rollcall/util/io.hpp"

namespace rollcall::synth {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTableStream = 0x7461626c;
constexpr std::uint64_t kBillStream = 0x62696c6c;
constexpr std::uint64_t kIdealStream = 0x6964656c;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;

corpus::Party other(corpus::Party p) {
    return p == corpus::Party::rep ? corpus::Party::dem : corpus::Party::rep;
}

int party_sign(corpus::Party p) { return p == corpus::Party::rep ? 1 : -1; }

std::string pad_number(std::size_t value, std::size_t max_value) {
    const std::string digits = std::to_string(value);
    const std::size_t width = std::to_string(max_value).size();
    return std::string(width - digits.size(), '0') + digits;
}

std::string topic_text(std::size_t topic, std::size_t length, std::size_t vocab, nd::Rng& rng) {
    std::string text;
    for (std::size_t i = 0; i < length; ++i) {
        if (i) text += " ";
        text += "t" + std::to_string(topic) + "w" + std::to_string(rng.below(vocab));
    }
    return text;
}

}  // namespace

std::size_t SynthSpec::majority_topics() const {
    return static_cast<std::size_t>(std::llround(sponsor_majority_prob * static_cast<double>(topics)));
}

SynthSpec SynthSpec::from_json(const json& j) {
    static const std::set<std::string> known{
        "sessions",           "topics",     "legislators_per_party",
        "bills_per_session",  "sponsor_majority_prob",
        "topic_vocab_size",   "vote_noise", "flip_topic_polarity_on_majority_change",
        "seed"};
    if (!j.is_object()) throw std::runtime_error("spec must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw std::runtime_error("unknown spec key `" + it.key() + "`");

    SynthSpec s;
    if (!j.contains("sessions") || !j.at("sessions").is_array())
        throw std::runtime_error("spec needs a `sessions` array");
    for (const auto& e : j.at("sessions")) {
        if (!e.is_object() || !e.contains("label") || !e.contains("majority"))
            throw std::runtime_error("each session needs `label` and `majority`");
        for (auto it = e.begin(); it != e.end(); ++it)
            if (it.key() != "label" && it.key() != "majority")
                throw std::runtime_error("unknown session key `" + it.key() + "`");
        SynthSession sess;
        sess.label = e.at("label").get<std::string>();
        sess.majority = corpus::parse_party(e.at("majority").get<std::string>());
        s.sessions.push_back(std::move(sess));
    }
    if (j.contains("topics")) s.topics = j.at("topics").get<std::size_t>();
    if (j.contains("legislators_per_party"))
        s.legislators_per_party = j.at("legislators_per_party").get<std::size_t>();
    if (j.contains("bills_per_session"))
        s.bills_per_session = j.at("bills_per_session").get<std::size_t>();
    if (j.contains("sponsor_majority_prob"))
        s.sponsor_majority_prob = j.at("sponsor_majority_prob").get<double>();
    if (j.contains("topic_vocab_size"))
        s.topic_vocab_size = j.at("topic_vocab_size").get<std::size_t>();
    if (j.contains("vote_noise")) s.vote_noise = j.at("vote_noise").get<double>();
    if (j.contains("flip_topic_polarity_on_majority_change"))
        s.flip_topic_polarity_on_majority_change =
            j.at("flip_topic_polarity_on_majority_change").get<bool>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

json SynthSpec::to_json() const {
    json j;
    j["sessions"] = json::array();
    for (const auto& s : sessions)
        j["sessions"].push_back({{"label", s.label}, {"majority", corpus::to_string(s.majority)}});
    j["topics"] = topics;
    j["legislators_per_party"] = legislators_per_party;
    j["bills_per_session"] = bills_per_session;
    j["sponsor_majority_prob"] = sponsor_majority_prob;
    j["topic_vocab_size"] = topic_vocab_size;
    j["vote_noise"] = vote_noise;
    j["flip_topic_polarity_on_majority_change"] = flip_topic_polarity_on_majority_change;
    j["seed"] = seed;
    return j;
}

void SynthSpec::validate() const {
    if (sessions.size() < 2) throw std::runtime_error("need at least 2 sessions");
    std::set<std::string> labels;
    for (const auto& s : sessions) {
        if (s.label.empty()) throw std::runtime_error("session label is empty");
        if (!labels.insert(s.label).second)
            throw std::runtime_error("duplicate session label `" + s.label + "`");
        if (s.majority == corpus::Party::ind)
            throw std::runtime_error("session majority must be R or D");
    }
    if (topics < 2) throw std::runtime_error("need at least 2 topics");
    if (legislators_per_party == 0) throw std::runtime_error("need at least 1 legislator per party");
    if (bills_per_session == 0) throw std::runtime_error("need at least 1 bill per session");
    if (topic_vocab_size == 0) throw std::runtime_error("topic vocabulary must be nonempty");
    if (!(sponsor_majority_prob >= 0.0 && sponsor_majority_prob <= 1.0))
        throw std::runtime_error("sponsor_majority_prob must lie in [0,1]");
    if (!(vote_noise >= 0.0 && vote_noise <= 1.0))
        throw std::runtime_error("vote_noise must lie in [0,1]");
}

std::vector<SessionTables> build_tables(const SynthSpec& spec) {
    spec.validate();
    const std::size_t K = spec.topics;
    const std::size_t M = spec.majority_topics();
    auto rng = nd::Rng(spec.seed).derive(kTableStream);

    std::vector<SessionTables> tables;
    for (std::size_t si = 0; si < spec.sessions.size(); ++si) {
        const auto majority = spec.sessions[si].majority;
        SessionTables t;
        if (si == 0) {
            std::vector<std::size_t> order(K);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            t.owner.assign(K, other(majority));
            for (std::size_t i = 0; i < M; ++i) t.owner[order[i]] = majority;
            t.polarity.resize(K);
            for (std::size_t k = 0; k < K; ++k) t.polarity[k] = party_sign(t.owner[k]);
        } else if (majority == spec.sessions[si - 1].majority) {
            t = tables.back();
        } else {
            t = tables.back();
            const std::size_t owned = static_cast<std::size_t>(
                std::count(t.owner.begin(), t.owner.end(), majority));
            const corpus::Party from = owned < M ? other(majority) : majority;
            const corpus::Party to = other(from);
            const std::size_t moves = owned < M ? M - owned : owned - M;
            std::vector<std::size_t> pool;
            for (std::size_t k = 0; k < K; ++k)
                if (t.owner[k] == from) pool.push_back(k);
            rng.shuffle(pool);
            for (std::size_t i = 0; i < moves; ++i) t.owner[pool[i]] = to;
            if (spec.flip_topic_polarity_on_majority_change)
                for (std::size_t k = 0; k < K; ++k) t.polarity[k] = party_sign(t.owner[k]);
        }
        tables.push_back(std::move(t));
    }
    return tables;
}

void generate_corpus_files(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    const auto tables = build_tables(spec);
    std::filesystem::create_directories(out_dir);

    const std::size_t n = spec.legislators_per_party;
    std::vector<std::string> leg_ids;
    std::string legs_text;
    for (const auto party : {corpus::Party::rep, corpus::Party::dem}) {
        const std::string prefix = party == corpus::Party::rep ? "R" : "D";
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = prefix + pad_number(i, n - 1);
            json j;
            j["legislator_id"] = id;
            j["party"] = corpus::to_string(party);
            j["chamber"] = "house";
            legs_text += j.dump() + "\n";
            leg_ids.push_back(id);
        }
    }

    // Party-aligned scalar ideal points; only the sign reaches the vote rule.
    auto ideal_rng = nd::Rng(spec.seed).derive(kIdealStream);
    std::vector<double> ideals;
    for (std::size_t i = 0; i < 2 * n; ++i) {
        const double magnitude = 1.0 + 0.05 * ideal_rng.uniform01();
        ideals.push_back(i < n ? magnitude : -magnitude);
    }

    auto bill_rng = nd::Rng(spec.seed).derive(kBillStream);
    auto noise_rng = nd::Rng(spec.seed).derive(kNoiseStream);
    std::vector<std::size_t> member(n);

    std::string bills_text, votes_text;
    for (std::size_t si = 0; si < spec.sessions.size(); ++si) {
        const auto& session = spec.sessions[si];
        for (std::size_t bi = 0; bi < spec.bills_per_session; ++bi) {
            const std::string bill_id = session.label + "-" + pad_number(bi, spec.bills_per_session - 1);
            const std::size_t topic = bill_rng.below(spec.topics);
            const std::string summary =
                topic_text(topic, 8 + bill_rng.below(8), spec.topic_vocab_size, bill_rng);
            const std::string fulltext =
                topic_text(topic, 24 + bill_rng.below(24), spec.topic_vocab_size, bill_rng);

            const corpus::Party owner = tables[si].owner[topic];
            const std::size_t base = owner == corpus::Party::rep ? 0 : n;
            std::iota(member.begin(), member.end(), std::size_t{0});
            bill_rng.shuffle(member);
            const std::size_t cosponsors = std::min(bill_rng.below(3), n - 1);
            json sponsor_ids = json::array();
            for (std::size_t i = 0; i <= cosponsors; ++i)
                sponsor_ids.push_back(leg_ids[base + member[i]]);

            json b;
            b["bill_id"] = bill_id;
            b["session"] = session.label;
            b["chamber"] = "house";
            b["title"] = "Synthetic measure " + bill_id;
            b["summary_text"] = summary;
            b["fulltext"] = fulltext;
            b["sponsor_ids"] = std::move(sponsor_ids);
            bills_text += b.dump() + "\n";

            const int polarity = tables[si].polarity[topic];
            for (std::size_t li = 0; li < 2 * n; ++li) {
                bool yes = ideals[li] * polarity > 0;
                if (noise_rng.uniform01() < spec.vote_noise) yes = !yes;
                json v;
                v["bill_id"] = bill_id;
                v["legislator_id"] = leg_ids[li];
                v["outcome"] = yes ? "yes" : "no";
                votes_text += v.dump() + "\n";
            }
        }
    }

    util::atomic_write(out_dir / "bills.jsonl", bills_text);
    util::atomic_write(out_dir / "legislators.jsonl", legs_text);
    util::atomic_write(out_dir / "votes.jsonl", votes_text);
}

std::map<std::pair<std::string, std::string>, OraclePair> oracle_accuracies(const SynthSpec& spec) {
    const auto tables = build_tables(spec);
    const double noise = spec.vote_noise;
    const double K = static_cast<double>(spec.topics);

    // A learner fit on noisy labels recovers each train-session map up to a
    // global inversion when noise exceeds one half.
    const int label_sign = noise <= 0.5 ? 1 : -1;
    const auto match_accuracy = [&](std::size_t matches) {
        const double frac = static_cast<double>(matches) / K;
        return frac * (1.0 - noise) + (1.0 - frac) * noise;
    };

    std::map<std::pair<std::string, std::string>, OraclePair> out;
    for (std::size_t i = 0; i < spec.sessions.size(); ++i) {
        for (std::size_t j = 0; j < spec.sessions.size(); ++j) {
            std::size_t text_matches = 0;
            for (std::size_t k = 0; k < spec.topics; ++k)
                if (label_sign * tables[i].polarity[k] == tables[j].polarity[k]) ++text_matches;

            // Train-side fit of the rule "polarity = r * sponsor sign".
            int align = 0;
            for (std::size_t k = 0; k < spec.topics; ++k)
                align += tables[i].polarity[k] * party_sign(tables[i].owner[k]);
            const int r = label_sign * (align >= 0 ? 1 : -1);
            std::size_t sponsor_matches = 0;
            for (std::size_t k = 0; k < spec.topics; ++k)
                if (r * party_sign(tables[j].owner[k]) == tables[j].polarity[k]) ++sponsor_matches;

            OraclePair p;
            p.text_only = match_accuracy(text_matches);
            p.with_sponsor = std::max(p.text_only, match_accuracy(sponsor_matches));
            out[{spec.sessions[i].label, spec.sessions[j].label}] = p;
        }
    }
    return out;
}

}  // namespace rollcall::synth
