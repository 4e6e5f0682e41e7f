#pragma once

#include "rollcall/corpus/types.hpp"

namespace rollcall::eval {

// Hand-built corpus for gradient checking: 3 legislators, 3 votes, 18
// distinct tokens (vocabulary size 20 with padding and OOV). Small enough
// that finite differences over every parameter stay cheap.
corpus::Corpus micro_corpus();

// 20 conflict-free votes (4 legislators x 5 bills) whose labels alternate
// with bill and legislator parity. Every variant can drive its training
// accuracy to 1.0 on this; the labels are balanced within each bill, so
// unanimity filtering would keep all of it.
corpus::Corpus memorization_corpus();

}  // namespace rollcall::eval
