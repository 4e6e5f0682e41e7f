#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rollcall/eval/harness.hpp"

namespace rollcall::eval {

// Sorts by (model, setting, split) in place; report writers assume this order.
void sort_results(std::vector<EvalResult>& results);

// Header "model,setting,split,votes,accuracy"; accuracy printed with four decimals.
std::string to_csv(const std::vector<EvalResult>& results);

// Aligned grid: one row per model, one column per (setting, split) pair.
std::string to_table(const std::vector<EvalResult>& results);

nlohmann::json to_json(const std::vector<EvalResult>& results);

// Writes <base>.csv, <base>.txt, and <base>.json atomically.
void write_reports(std::vector<EvalResult> results, const std::string& base_path);

}  // namespace rollcall::eval
