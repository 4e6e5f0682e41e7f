#include "rollcall/eval/fixtures.hpp"

#include <string>
#include <vector>

namespace rollcall::eval {

namespace {

using corpus::Bill;
using corpus::Corpus;
using corpus::Legislator;
using corpus::Party;
using corpus::VoteRecord;

void add_legislator(Corpus& c, const std::string& id, Party party) {
    Legislator l;
    l.legislator_id = id;
    l.party = party;
    c.legislators[id] = l;
    std::size_t row = 0;
    for (auto& [ignored, leg] : c.legislators) leg.row_index = row++;
}

void add_bill(Corpus& c, const std::string& id, const std::string& session,
              std::vector<std::string> summary, std::vector<std::string> fulltext, double p_r,
              double p_d) {
    Bill b;
    b.bill_id = id;
    b.session = session;
    b.summary_tokens = std::move(summary);
    b.fulltext_tokens = std::move(fulltext);
    b.p_r = p_r;
    b.p_d = p_d;
    c.bills[id] = b;
    c.session_bills[session].push_back(id);
}

void add_vote(Corpus& c, const std::string& bill, const std::string& leg, int outcome) {
    c.votes.push_back(VoteRecord{bill, leg, outcome});
}

}  // namespace

Corpus micro_corpus() {
    Corpus c;
    add_legislator(c, "m0", Party::rep);
    add_legislator(c, "m1", Party::dem);
    add_legislator(c, "m2", Party::rep);
    add_bill(c, "b0", "s1",
             {"appropriations", "budget", "commerce", "defense", "education", "energy", "farm"},
             {"farm", "energy", "appropriations", "budget", "budget"}, 1.0, 0.0);
    add_bill(c, "b1", "s1", {"grant", "health", "infrastructure", "judiciary", "labor", "medicare"},
             {"medicare", "health", "grant", "labor"}, 0.0, 1.0);
    add_bill(c, "b2", "s1", {"parks", "revenue", "schools", "transit", "water"},
             {"water", "parks", "schools", "revenue", "transit", "parks"}, 0.5, 0.5);
    add_vote(c, "b0", "m0", 1);
    add_vote(c, "b1", "m1", 0);
    add_vote(c, "b2", "m2", 1);
    return c;
}

Corpus memorization_corpus() {
    Corpus c;
    add_legislator(c, "h0", Party::rep);
    add_legislator(c, "h1", Party::rep);
    add_legislator(c, "h2", Party::dem);
    add_legislator(c, "h3", Party::dem);
    for (std::size_t i = 0; i < 5; ++i) {
        const std::string id = "k" + std::to_string(i);
        const std::string unique = "u" + std::to_string(i);
        const std::string parity = (i % 2 == 0) ? "even" : "odd";
        const double p_r = (i % 2 == 0) ? 1.0 : 0.0;
        add_bill(c, id, "s1", {"issue", unique, parity}, {parity, "issue", unique, unique}, p_r,
                 1.0 - p_r);
        for (std::size_t row = 0; row < 4; ++row)
            add_vote(c, id, "h" + std::to_string(row), (i + row) % 2 == 0 ? 1 : 0);
    }
    return c;
}

}  // namespace rollcall::eval
