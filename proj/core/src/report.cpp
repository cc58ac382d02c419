#include "toneforge/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <utility>

#include "toneforge/errors.hpp"

namespace toneforge {

namespace {

const std::string kBanner(72, '=');
const std::string kRule(40, '-');

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string score_text(const ExampleRecord& r) {
    if (!r.verdict) return "n/a";
    auto mean = r.verdict->mean_grade();
    return mean ? fixed(*mean, 2) : "n/a";
}

using GroupKey = std::pair<std::string, std::string>;  // tone name, model

// Groups rewritten records by (tone, rewrite model), ordered by tone name
// then model, records in id order.
std::map<GroupKey, std::vector<const ExampleRecord*>> group(const DatasetTable& table, auto&& keep) {
    std::map<GroupKey, std::vector<const ExampleRecord*>> groups;
    for (const ExampleRecord& r : table.records) {
        if (!r.rewrite_text || !keep(r)) continue;
        groups[{std::string(to_string(r.tone)), *r.rewrite_model}].push_back(&r);
    }
    return groups;
}

std::string render_groups(const std::map<GroupKey, std::vector<const ExampleRecord*>>& groups, std::size_t limit) {
    std::string out;
    for (const auto& [key, records] : groups) {
        if (!out.empty()) out += '\n';
        out += kBanner + "\nTone: " + key.first + " | Model: " + key.second + "\n" + kBanner + "\n";
        const std::size_t shown = std::min(limit, records.size());
        for (std::size_t i = 0; i < shown; ++i) {
            const ExampleRecord& r = *records[i];
            out += "\nExample " + std::to_string(r.id) + ":\n";
            out += "Original: " + r.source_text + "\n";
            out += "Rewrite:  " + *r.rewrite_text + "\n";
            out += "Score:    " + score_text(r) + "\n";
            out += kRule + "\n";
        }
    }
    return out;
}

}  // namespace

const ToneTable::Row* ToneTable::find(const std::string& model) const {
    for (const Row& row : rows) {
        if (row.model == model) return &row;
    }
    return nullptr;
}

ToneTable tone_table(const std::vector<DatasetTable>& tables) {
    struct Acc {
        double sum = 0;
        std::size_t n = 0;
    };
    std::map<std::string, std::array<Acc, 9>> acc;
    for (const DatasetTable& table : tables) {
        std::size_t valid = 0;
        for (const ExampleRecord& r : table.records) {
            if (!r.verdict || !r.verdict->valid() || !r.rewrite_model) continue;
            ++valid;
            const auto col = std::find(kReportToneOrder.begin(), kReportToneOrder.end(), r.tone) - kReportToneOrder.begin();
            Acc& a = acc[*r.rewrite_model][static_cast<std::size_t>(col)];
            a.sum += *r.verdict->normalized();
            ++a.n;
        }
        if (valid == 0) throw Error("table '" + table.name + "' has no valid verdicts");
    }

    ToneTable out;
    for (const auto& [model, cells] : acc) {
        ToneTable::Row row;
        row.model = model;
        double total = 0;
        std::size_t present = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].n == 0) continue;
            row.cells[c] = cells[c].sum / static_cast<double>(cells[c].n);
            total += *row.cells[c];
            ++present;
        }
        if (present > 0) row.average = total / static_cast<double>(present);
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string render_tone_table(const ToneTable& table) {
    std::size_t model_width = 5;
    for (const auto& row : table.rows) model_width = std::max(model_width, row.model.size());

    std::vector<std::string> headers;
    for (Tone t : kReportToneOrder) headers.emplace_back(display_name(t));
    headers.emplace_back("Avg. Tone");
    std::vector<std::size_t> widths;
    for (const auto& h : headers) widths.push_back(std::max<std::size_t>(h.size(), 5));

    auto pad_left = [](const std::string& s, std::size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; };
    auto pad_right = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };

    std::string out = pad_right("Model", model_width);
    for (std::size_t i = 0; i < headers.size(); ++i) out += "  " + pad_left(headers[i], widths[i]);
    out += '\n';
    for (const auto& row : table.rows) {
        std::string line = pad_right(row.model, model_width);
        for (std::size_t i = 0; i < row.cells.size(); ++i)
            line += "  " + pad_left(row.cells[i] ? fixed(*row.cells[i], 1) : "", widths[i]);
        line += "  " + pad_left(row.average ? fixed(*row.average, 1) : "", widths.back());
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

std::string show_results(const DatasetTable& table, int n) {
    if (n < 1) throw PreconditionError("-n must be at least 1");
    auto groups = group(table, [](const ExampleRecord& r) { return r.verdict.has_value(); });
    if (groups.empty()) return "no judged examples\n";
    return render_groups(groups, static_cast<std::size_t>(n));
}

std::string show_examples(const DatasetTable& table, const ExampleFilter& filter) {
    auto groups = group(table, [&](const ExampleRecord& r) {
        if (filter.tone && r.tone != *filter.tone) return false;
        if (filter.model && r.rewrite_model != *filter.model) return false;
        if (filter.min_score) {
            auto mean = r.verdict ? r.verdict->mean_grade() : std::nullopt;
            if (!mean || *mean < *filter.min_score) return false;
        }
        return true;
    });
    return render_groups(groups, static_cast<std::size_t>(-1));
}

}  // namespace toneforge
