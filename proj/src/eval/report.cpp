#include "rollcall/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "rollcall/util/io.hpp"

namespace rollcall::eval {

namespace {
std::string fmt_acc(double accuracy) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", accuracy);
    return buf;
}
}  // namespace

void sort_results(std::vector<EvalResult>& results) {
    std::sort(results.begin(), results.end(), [](const EvalResult& a, const EvalResult& b) {
        return std::tie(a.model, a.setting, a.split) < std::tie(b.model, b.setting, b.split);
    });
}

std::string to_csv(const std::vector<EvalResult>& results) {
    std::string out = "model,setting,split,votes,accuracy\n";
    for (const auto& r : results)
        out += r.model + "," + r.setting + "," + r.split + "," + std::to_string(r.votes) + "," +
               fmt_acc(r.accuracy) + "\n";
    return out;
}

std::string to_table(const std::vector<EvalResult>& results) {
    if (results.empty()) return "model\n(no results)\n";

    std::set<std::string> models;
    std::set<std::pair<std::string, std::string>> columns;
    std::map<std::tuple<std::string, std::string, std::string>, double> cells;
    for (const auto& r : results) {
        models.insert(r.model);
        columns.insert({r.setting, r.split});
        cells[{r.model, r.setting, r.split}] = r.accuracy;
    }

    std::vector<std::string> headers{"model"};
    for (const auto& [setting, split] : columns) headers.push_back(setting + "/" + split);

    std::vector<std::vector<std::string>> rows;
    for (const auto& m : models) {
        std::vector<std::string> row{m};
        for (const auto& [setting, split] : columns) {
            const auto it = cells.find({m, setting, split});
            row.push_back(it == cells.end() ? "-" : fmt_acc(it->second));
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        widths[c] = headers[c].size();
        for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
    }

    const auto emit_row = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) line += "  ";
            line += row[c];
            if (c + 1 < row.size()) line += std::string(widths[c] - row[c].size(), ' ');
        }
        return line + "\n";
    };

    std::string out = emit_row(headers);
    std::size_t total = 0;
    for (std::size_t c = 0; c < widths.size(); ++c) total += widths[c] + (c ? 2 : 0);
    out += std::string(total, '-') + "\n";
    for (const auto& row : rows) out += emit_row(row);
    return out;
}

nlohmann::json to_json(const std::vector<EvalResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json obj;
        obj["model"] = r.model;
        obj["setting"] = r.setting;
        obj["split"] = r.split;
        obj["votes"] = r.votes;
        obj["accuracy"] = std::stod(fmt_acc(r.accuracy));
        arr.push_back(std::move(obj));
    }
    return arr;
}

void write_reports(std::vector<EvalResult> results, const std::string& base_path) {
    if (base_path.empty()) throw std::runtime_error("report base path is empty");
    sort_results(results);
    util::atomic_write(base_path + ".csv", to_csv(results));
    util::atomic_write(base_path + ".txt", to_table(results));
    util::atomic_write(base_path + ".json", to_json(results).dump(2) + "\n");
}

}  // namespace rollcall::eval
