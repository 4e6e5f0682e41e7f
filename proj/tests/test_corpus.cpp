#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "rollcall/corpus/corpus.hpp"
#include "rollcall/corpus/parse.hpp"
#include "rollcall/corpus/preprocess.hpp"
#include "rollcall/corpus/splits.hpp"
#include "rollcall/corpus/vocab.hpp"
#include "rollcall/nd/rng.hpp"
#include "rollcall/util/io.hpp"

using namespace rollcall;
namespace fs = std::filesystem;
using corpus::Bill;
using corpus::Corpus;
using corpus::Legislator;
using corpus::RawBill;
using corpus::StopwordSet;
using corpus::VoteRecord;

namespace {

fs::path repo_data(const std::string& name) { return fs::path(ROLLCALL_SOURCE_DIR) / "data" / name; }

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path = fs::temp_directory_path() /
               ("rollcall_corpus_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p);
    for (const auto& l : lines) out << l << "\n";
}

// Minimal well-formed trio of input files: 2 bills, 3 legislators, 5 votes.
void write_tiny_corpus(const fs::path& dir) {
    write_lines(dir / "bills.jsonl",
                {R"({"bill_id":"b1","session":"s1","chamber":"house","title":"Water Act",)"
                 R"("summary_text":"A bill about water rights","sponsor_ids":["l1","l2"]})",
                 R"({"bill_id":"b2","session":"s1","chamber":"house","title":"Roads",)"
                 R"("summary_text":"Funding for roads","fulltext":"Extended text on road funding",)"
                 R"("sponsor_ids":["l3"]})"});
    write_lines(dir / "legislators.jsonl",
                {R"({"legislator_id":"l1","party":"R","chamber":"house"})",
                 R"({"legislator_id":"l2","party":"D","chamber":"house"})",
                 R"({"legislator_id":"l3","party":"I","chamber":"house"})"});
    write_lines(dir / "votes.jsonl",
                {R"({"bill_id":"b1","legislator_id":"l1","outcome":"yes"})",
                 R"({"bill_id":"b1","legislator_id":"l2","outcome":"no"})",
                 R"({"bill_id":"b1","legislator_id":"l3","outcome":"yes"})",
                 R"({"bill_id":"b2","legislator_id":"l1","outcome":"no"})",
                 R"({"bill_id":"b2","legislator_id":"l2","outcome":"yes"})"});
}

Corpus synth_corpus(std::size_t n_sessions, std::size_t bills_per_session) {
    Corpus c;
    for (std::size_t s = 0; s < n_sessions; ++s) {
        const std::string session = "s" + std::to_string(s);
        for (std::size_t i = 0; i < bills_per_session; ++i) {
            Bill b;
            b.bill_id = session + "_b" + std::to_string(i);
            b.session = session;
            c.session_bills[session].push_back(b.bill_id);
            c.bills.emplace(b.bill_id, std::move(b));
        }
    }
    return c;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs") {
    auto t = corpus::tokenize("H.R. 1044--2nd Session!");
    CHECK(t == std::vector<std::string>{"h", "r", "1044", "2nd", "session"});
    CHECK(corpus::tokenize("").empty());
    CHECK(corpus::tokenize("...---...").empty());
}

TEST_CASE("preprocess_text removes stopwords then truncates") {
    auto stop = StopwordSet::from_tokens({"the"});
    auto t = corpus::preprocess_text("The Act amends THE code", stop, 400);
    CHECK(t == std::vector<std::string>{"act", "amends", "code"});

    // Removal happens before the cap, so stopwords never consume cap slots.
    auto t2 = corpus::preprocess_text("the a x the a y the a z", StopwordSet::from_tokens({"the", "a"}), 2);
    CHECK(t2 == std::vector<std::string>{"x", "y"});

    std::string longtext;
    for (int i = 0; i < 500; ++i) longtext += "tok" + std::to_string(i) + " ";
    CHECK(corpus::preprocess_text(longtext, stop, 400).size() == 400);
    CHECK(corpus::preprocess_text(longtext, stop, 2000).size() == 500);
}

TEST_CASE("shipped stopword list is pinned") {
    const auto path = repo_data("stopwords.txt");
    REQUIRE(fs::exists(path));
    CHECK(util::fnv1a64_file(path) == 0xc3ad048c573d4f98ULL);
    auto stop = StopwordSet::load(path);
    CHECK(stop.size() == 127);
    CHECK(stop.contains("the"));
    CHECK(stop.contains("of"));
    CHECK_FALSE(stop.contains("act"));
    CHECK_FALSE(stop.contains("amends"));
    CHECK_FALSE(stop.contains("code"));
}

TEST_CASE("parse_corpus reads well-formed files") {
    TempDir tmp;
    write_tiny_corpus(tmp.path);
    auto parsed = corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1);
    CHECK(parsed.bills.size() == 2);
    CHECK(parsed.legislators.size() == 3);
    CHECK(parsed.votes.size() == 5);
    CHECK(parsed.bills[1].fulltext == "Extended text on road funding");
    CHECK(parsed.bills[0].fulltext.empty());

    CHECK_THROWS_WITH_AS(corpus::parse_corpus(tmp.path, "rollcall.corpus.v9"),
                         doctest::Contains("unsupported corpus schema"), std::runtime_error);
}

TEST_CASE("parse_corpus reports the offending file and line") {
    TempDir tmp;
    write_tiny_corpus(tmp.path);

    SUBCASE("malformed JSON") {
        write_lines(tmp.path / "bills.jsonl",
                    {R"({"bill_id":"b1","session":"s1","chamber":"house","title":"t",)"
                     R"("summary_text":"water","sponsor_ids":[]})",
                     R"({not json)"});
        CHECK_THROWS_WITH_AS(corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1),
                             doctest::Contains("bills.jsonl:2"), std::runtime_error);
    }
    SUBCASE("missing bill_id") {
        write_lines(tmp.path / "bills.jsonl",
                    {R"({"session":"s1","chamber":"house","title":"t","summary_text":"w",)"
                     R"("sponsor_ids":[]})"});
        try {
            corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1);
            FAIL("expected parse error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("bills.jsonl:1") != std::string::npos);
            CHECK(std::string(e.what()).find("bill_id") != std::string::npos);
        }
    }
    SUBCASE("dangling vote reference") {
        write_lines(tmp.path / "votes.jsonl",
                    {R"({"bill_id":"nope","legislator_id":"l1","outcome":"yes"})"});
        CHECK_THROWS_WITH_AS(corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1),
                             doctest::Contains("unknown bill"), std::runtime_error);
    }
    SUBCASE("duplicate bill id") {
        write_lines(tmp.path / "bills.jsonl",
                    {R"({"bill_id":"b1","session":"s1","chamber":"house","title":"t",)"
                     R"("summary_text":"w","sponsor_ids":[]})",
                     R"({"bill_id":"b1","session":"s1","chamber":"house","title":"t",)"
                     R"("summary_text":"w","sponsor_ids":[]})"});
        CHECK_THROWS_WITH_AS(corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1),
                             doctest::Contains("duplicate bill_id"), std::runtime_error);
    }
    SUBCASE("duplicate vote") {
        write_lines(tmp.path / "votes.jsonl",
                    {R"({"bill_id":"b1","legislator_id":"l1","outcome":"yes"})",
                     R"({"bill_id":"b1","legislator_id":"l1","outcome":"no"})"});
        CHECK_THROWS_WITH_AS(corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1),
                             doctest::Contains("duplicate vote"), std::runtime_error);
    }
    SUBCASE("bad outcome") {
        write_lines(tmp.path / "votes.jsonl",
                    {R"({"bill_id":"b1","legislator_id":"l1","outcome":"present"})"});
        CHECK_THROWS(corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1));
    }
}

TEST_CASE("filter_unanimous keeps bills with enough dissent") {
    std::vector<RawBill> bills(2);
    bills[0].bill_id = "b_unanimous";
    bills[1].bill_id = "b_contested";
    std::map<std::string, corpus::VoteTally> tallies;
    tallies["b_unanimous"] = {100, 0};
    tallies["b_contested"] = {98, 2};
    auto retained = corpus::filter_unanimous(bills, tallies, 0.01);
    CHECK(retained == std::set<std::string>{"b_contested"});

    SUBCASE("boundary: exactly at threshold is retained") {
        tallies["b_unanimous"] = {99, 1};
        retained = corpus::filter_unanimous(bills, tallies, 0.01);
        CHECK(retained.count("b_unanimous") == 1);
    }
    SUBCASE("zero votes is an error") {
        std::vector<RawBill> more = bills;
        more.emplace_back().bill_id = "b_orphan";
        CHECK_THROWS_WITH_AS(corpus::filter_unanimous(more, tallies, 0.01),
                             doctest::Contains("no votes"), std::runtime_error);
    }
    SUBCASE("threshold domain") {
        CHECK_THROWS(corpus::filter_unanimous(bills, tallies, 0.0));
        CHECK_THROWS(corpus::filter_unanimous(bills, tallies, 1.0));
    }
}

TEST_CASE("sponsor fractions") {
    std::map<std::string, Legislator> legs;
    auto add = [&](const std::string& id, corpus::Party p) {
        Legislator l;
        l.legislator_id = id;
        l.party = p;
        legs.emplace(id, l);
    };
    for (int i = 0; i < 7; ++i) add("r" + std::to_string(i), corpus::Party::rep);
    for (int i = 0; i < 3; ++i) add("d" + std::to_string(i), corpus::Party::dem);
    add("i0", corpus::Party::ind);

    std::vector<std::string> ten;
    for (int i = 0; i < 7; ++i) ten.push_back("r" + std::to_string(i));
    for (int i = 0; i < 3; ++i) ten.push_back("d" + std::to_string(i));
    auto [pr, pd] = corpus::compute_sponsor_fractions(ten, legs);
    CHECK(pr == doctest::Approx(0.7));
    CHECK(pd == doctest::Approx(0.3));

    auto [pr2, pd2] = corpus::compute_sponsor_fractions({"r0", "i0"}, legs);
    CHECK(pr2 == doctest::Approx(0.5));
    CHECK(pd2 == 0.0);

    auto [pr3, pd3] = corpus::compute_sponsor_fractions({}, legs);
    CHECK(pr3 == 0.0);
    CHECK(pd3 == 0.0);

    CHECK_THROWS_WITH_AS(corpus::compute_sponsor_fractions({"ghost"}, legs),
                         doctest::Contains("unknown sponsor"), std::runtime_error);
}

TEST_CASE("build_corpus end to end on the tiny fixture") {
    TempDir tmp;
    write_tiny_corpus(tmp.path);
    auto parsed = corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1);
    auto stop = StopwordSet::from_tokens({"a", "about", "for", "on"});
    corpus::CorpusOptions opt;
    auto c = corpus::build_corpus(parsed, stop, opt);

    // Both bills have dissent, so both survive.
    CHECK(c.bills.size() == 2);
    CHECK(c.votes.size() == 5);
    CHECK(c.bills.at("b1").summary_tokens == std::vector<std::string>{"bill", "water", "rights"});
    CHECK(c.bills.at("b1").p_r == doctest::Approx(0.5));
    CHECK(c.bills.at("b1").p_d == doctest::Approx(0.5));
    CHECK(c.bills.at("b2").p_r == 0.0);
    CHECK(c.bills.at("b2").p_d == 0.0);

    // row_index is a dense bijection in sorted id order.
    CHECK(c.legislators.at("l1").row_index == 0);
    CHECK(c.legislators.at("l2").row_index == 1);
    CHECK(c.legislators.at("l3").row_index == 2);
    CHECK(c.session_bills.at("s1") == std::vector<std::string>{"b1", "b2"});
}

TEST_CASE("build_corpus drops unanimous bills and their votes") {
    TempDir tmp;
    write_tiny_corpus(tmp.path);
    write_lines(tmp.path / "votes.jsonl",
                {R"({"bill_id":"b1","legislator_id":"l1","outcome":"yes"})",
                 R"({"bill_id":"b1","legislator_id":"l2","outcome":"yes"})",
                 R"({"bill_id":"b2","legislator_id":"l1","outcome":"no"})",
                 R"({"bill_id":"b2","legislator_id":"l2","outcome":"yes"})"});
    auto parsed = corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1);
    auto c = corpus::build_corpus(parsed, StopwordSet{}, {});
    CHECK(c.bills.size() == 1);
    CHECK(c.bills.count("b2") == 1);
    for (const auto& v : c.votes) CHECK(v.bill_id == "b2");
}

TEST_CASE("corpus cache round trip") {
    TempDir tmp;
    write_tiny_corpus(tmp.path);
    auto parsed = corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1);
    auto c = corpus::build_corpus(parsed, StopwordSet::from_tokens({"a"}), {});
    const auto cache = tmp.path / "corpus.json";
    corpus::save_corpus(c, cache);
    auto c2 = corpus::load_corpus(cache);
    CHECK(c2.bills.size() == c.bills.size());
    CHECK(c2.votes.size() == c.votes.size());
    CHECK(c2.legislators.size() == c.legislators.size());
    CHECK(c2.bills.at("b1").summary_tokens == c.bills.at("b1").summary_tokens);
    CHECK(c2.bills.at("b1").p_r == c.bills.at("b1").p_r);
    CHECK(c2.legislators.at("l2").row_index == 1);

    // Identical corpora serialize to identical bytes.
    const auto cache2 = tmp.path / "corpus2.json";
    corpus::save_corpus(c2, cache2);
    CHECK(util::read_file(cache) == util::read_file(cache2));
}

TEST_CASE("vocab assigns sorted dense indices with reserved pad and oov") {
    Bill b1;
    b1.summary_tokens = {"act", "water"};
    Bill b2;
    b2.summary_tokens = {"act"};
    b2.fulltext_tokens = {"zone", "act", "bill"};
    auto v = corpus::Vocab::build({&b1, &b2});
    CHECK(v.size() == 6);  // pad, oov, act, bill, water, zone
    CHECK(v.lookup("act") == 2);
    CHECK(v.lookup("bill") == 3);
    CHECK(v.lookup("water") == 4);
    CHECK(v.lookup("zone") == 5);
    CHECK(v.lookup("unseen") == corpus::Vocab::kOov);
    CHECK(corpus::Vocab::kPad == 0);

    auto idx = v.lookup_all({"water", "mystery", "act"});
    CHECK(idx == std::vector<std::uint32_t>{4, 1, 2});

    // Same bills, same assignment.
    auto v2 = corpus::Vocab::build({&b2, &b1});
    CHECK(v2.entries() == v.entries());
}

TEST_CASE("make_folds partitions bills stratified by session") {
    SUBCASE("10 bills, k=5 gives 5 disjoint folds of 2") {
        auto c = synth_corpus(1, 10);
        auto folds = corpus::make_folds(c, 5, 7);
        CHECK(folds.size() == 10);
        std::map<std::size_t, std::size_t> count;
        for (const auto& [id, f] : folds) {
            CHECK(f < 5);
            ++count[f];
        }
        for (std::size_t f = 0; f < 5; ++f) CHECK(count[f] == 2);
    }
    SUBCASE("same seed reproduces, different seed moves bills") {
        auto c = synth_corpus(3, 17);
        auto f1 = corpus::make_folds(c, 5, 42);
        auto f2 = corpus::make_folds(c, 5, 42);
        CHECK(f1 == f2);
        auto f3 = corpus::make_folds(c, 5, 43);
        CHECK(f1 != f3);
    }
    SUBCASE("2 sessions x 10 bills, k=5: every fold holds exactly 2 per session") {
        auto c = synth_corpus(2, 10);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto folds = corpus::make_folds(c, 5, seed);
            std::map<std::pair<std::string, std::size_t>, std::size_t> per;
            for (const auto& [bill, f] : folds)
                ++per[{c.bills.at(bill).session, f}];
            for (const auto& [key, n] : per) CHECK(n == 2);
            CHECK(per.size() == 10);
        }
    }
    SUBCASE("session smaller than k rejected") {
        auto c = synth_corpus(2, 3);
        CHECK_THROWS_WITH_AS(corpus::make_folds(c, 5, 1), doctest::Contains("fewer than k"),
                             std::runtime_error);
        CHECK_THROWS(corpus::make_folds(c, 1, 1));
    }
}

TEST_CASE("make_folds stratification property across random shapes") {
    nd::Rng rng(90210);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + rng.below(5);
        const std::size_t sessions = 1 + rng.below(4);
        auto c = synth_corpus(sessions, k + rng.below(23));
        auto folds = corpus::make_folds(c, k, rng.next_u64());

        // Partition: every bill mapped exactly once.
        CHECK(folds.size() == c.bills.size());
        // Stratification: per-session fold loads within one of each other.
        for (const auto& [session, ids] : c.session_bills) {
            std::vector<std::size_t> load(k, 0);
            for (const auto& id : ids) ++load[folds.at(id)];
            const auto [lo, hi] = std::minmax_element(load.begin(), load.end());
            CHECK(*hi - *lo <= 1);
        }
    }
}

TEST_CASE("out_of_session_split keeps only training-era legislators") {
    Corpus c = synth_corpus(2, 2);
    auto add_leg = [&](const std::string& id) {
        Legislator l;
        l.legislator_id = id;
        c.legislators.emplace(id, l);
    };
    add_leg("veteran");
    add_leg("newcomer");
    auto vote = [&](const std::string& bill, const std::string& leg) {
        c.votes.push_back(VoteRecord{bill, leg, 1});
    };
    vote("s0_b0", "veteran");
    vote("s0_b1", "veteran");
    vote("s1_b0", "veteran");
    vote("s1_b0", "newcomer");
    vote("s1_b1", "newcomer");

    auto split = corpus::out_of_session_split(c, {"s0"}, {"s1"});
    CHECK(split.train.size() == 2);
    CHECK(split.test.size() == 1);
    CHECK(split.test[0].legislator_id == "veteran");
    CHECK(split.dropped_test_votes == 2);
    CHECK_FALSE(split.empty_test);

    SUBCASE("no overlap allowed") {
        CHECK_THROWS_WITH_AS(corpus::out_of_session_split(c, {"s0", "s1"}, {"s1"}),
                             doctest::Contains("both train and test"), std::runtime_error);
        CHECK_THROWS(corpus::out_of_session_split(c, {}, {"s1"}));
    }
    SUBCASE("disjoint eras yield an empty flagged test set") {
        Corpus c2 = synth_corpus(2, 1);
        auto addl = [&](const std::string& id) {
            Legislator l;
            l.legislator_id = id;
            c2.legislators.emplace(id, l);
        };
        addl("old");
        addl("new");
        c2.votes.push_back(VoteRecord{"s0_b0", "old", 1});
        c2.votes.push_back(VoteRecord{"s1_b0", "new", 0});
        auto s = corpus::out_of_session_split(c2, {"s0"}, {"s1"});
        CHECK(s.test.empty());
        CHECK(s.empty_test);
        CHECK(s.dropped_test_votes == 1);
    }
}

TEST_CASE("corpus pipeline properties on random instances") {
    nd::Rng rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        TempDir tmp;
        const std::size_t n_legs = 3 + rng.below(8);
        const std::size_t n_bills = 2 + rng.below(10);

        std::vector<std::string> bill_lines, leg_lines, vote_lines;
        std::vector<std::string> leg_ids;
        for (std::size_t i = 0; i < n_legs; ++i) {
            const std::string id = "l" + std::to_string(i);
            leg_ids.push_back(id);
            const char* party = (i % 3 == 0) ? "R" : (i % 3 == 1 ? "D" : "I");
            leg_lines.push_back(R"({"legislator_id":")" + id + R"(","party":")" + party +
                                R"(","chamber":"house"})");
        }
        const char* fillers[] = {"water", "budget", "school", "tax", "energy", "the", "of", "act"};
        for (std::size_t i = 0; i < n_bills; ++i) {
            const std::string id = "b" + std::to_string(i);
            std::string summary;
            const std::size_t len = 1 + rng.below(12);
            for (std::size_t w = 0; w < len; ++w)
                summary += std::string(fillers[rng.below(8)]) + " ";
            std::string sponsors;
            const std::size_t n_sp = rng.below(4);
            for (std::size_t s = 0; s < n_sp; ++s) {
                if (s) sponsors += ",";
                sponsors += "\"" + leg_ids[rng.below(n_legs)] + "\"";
            }
            bill_lines.push_back(R"({"bill_id":")" + id + R"(","session":"s)" +
                                 std::to_string(i % 2) + R"(","chamber":"house","title":"t",)" +
                                 R"("summary_text":")" + summary + R"(","sponsor_ids":[)" +
                                 sponsors + "]}");
            // Guarantee at least one yes and one no so every bill survives.
            for (std::size_t l = 0; l < n_legs; ++l) {
                const char* outcome = (l == 0) ? "no" : (l == 1 ? "yes" : (rng.below(4) ? "yes" : "no"));
                vote_lines.push_back(R"({"bill_id":")" + id + R"(","legislator_id":")" +
                                     leg_ids[l] + R"(","outcome":")" + outcome + R"("})");
            }
        }
        write_lines(tmp.path / "bills.jsonl", bill_lines);
        write_lines(tmp.path / "legislators.jsonl", leg_lines);
        write_lines(tmp.path / "votes.jsonl", vote_lines);

        auto parsed = corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1);
        auto stop = StopwordSet::from_tokens({"the", "of"});
        corpus::CorpusOptions opt;
        opt.summary_cap = 6;
        auto c = corpus::build_corpus(parsed, stop, opt);

        auto tallies = corpus::tally_votes(c.votes);
        for (const auto& [id, b] : c.bills) {
            // Truncation property.
            CHECK(b.summary_tokens.size() <= opt.summary_cap);
            // Sponsor property.
            CHECK(b.p_r >= 0.0);
            CHECK(b.p_d >= 0.0);
            CHECK(b.p_r + b.p_d <= 1.0 + 1e-12);
            // Filter property.
            const auto& t = tallies.at(id);
            CHECK(static_cast<double>(t.no) / t.total() >= opt.unanimity_threshold);
            // Stopwords removed.
            for (const auto& tok : b.summary_tokens) CHECK_FALSE(stop.contains(tok));
        }
        // Every surviving vote references a surviving bill and legislator.
        for (const auto& v : c.votes) {
            CHECK(c.bills.count(v.bill_id) == 1);
            CHECK(c.legislators.count(v.legislator_id) == 1);
        }
        // Determinism: a second build from the same files matches exactly.
        auto c2 = corpus::build_corpus(corpus::parse_corpus(tmp.path, corpus::kCorpusSchemaV1),
                                       stop, opt);
        REQUIRE(c2.bills.size() == c.bills.size());
        for (const auto& [id, b] : c.bills) {
            CHECK(c2.bills.at(id).summary_tokens == b.summary_tokens);
            CHECK(c2.bills.at(id).p_r == b.p_r);
        }
    }
}
