#include "toneforge/csv_recovery.hpp"

#include <algorithm>
#include <map>

#include "toneforge/errors.hpp"
#include "toneforge/text.hpp"

namespace toneforge {

namespace {

constexpr std::size_t kMaxMergedLines = 8;
constexpr std::size_t kMaxHeaderField = 32;

bool is_fence(std::string_view line) { return text::trim(line).starts_with("```"); }
bool is_blank(std::string_view line) { return text::trim(line).empty(); }
std::size_t quote_count(std::string_view s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '"')); }
bool starts_quoted(std::string_view line) { return text::trim(line).starts_with('"'); }

std::optional<std::size_t> header_text_column(std::string_view line) {
    auto fields = csv::parse_record(text::trim(line));
    if (!fields) return std::nullopt;
    std::optional<std::size_t> column;
    for (std::size_t i = 0; i < fields->size(); ++i) {
        const std::string name = text::to_lower_ascii(text::trim((*fields)[i]));
        if (name.empty() || name.size() > kMaxHeaderField) return std::nullopt;
        const bool identifier = std::all_of(name.begin(), name.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == ' ';
        });
        if (!identifier) return std::nullopt;
        if (name == "text" && !column) column = i;
    }
    return column;
}

struct Candidate {
    csv::Row fields;
    std::size_t line = 0;
    bool quoted = false;
};

}  // namespace

std::vector<std::string> CsvBlock::texts() const {
    std::vector<std::string> out;
    for (const csv::Row& row : rows) {
        if (text_column >= row.size()) continue;
        std::string value = text::trim_copy(row[text_column]);
        if (!value.empty()) out.push_back(std::move(value));
    }
    return out;
}

CsvBlock parse_csv_block(std::string_view raw) {
    const std::vector<std::string_view> lines = text::split_lines(raw);
    CsvBlock block;
    auto diag = [&](std::size_t index, std::string message) { block.diagnostics.push_back({index + 1, std::move(message)}); };

    // Locate the start of the table.
    std::optional<std::size_t> start;
    std::size_t expected = 0;  // field count, 0 = infer
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_fence(lines[i]) || is_blank(lines[i])) continue;
        if (auto column = header_text_column(lines[i])) {
            block.header = *csv::parse_record(text::trim(lines[i]));
            for (std::string& h : block.header) h = text::trim_copy(h);
            block.text_column = *column;
            expected = block.header.size();
            start = i + 1;
            break;
        }
    }
    if (!start) {
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
            if (is_fence(lines[i]) || is_fence(lines[i + 1])) continue;
            if (text::trim(lines[i]).ends_with(':')) continue;
            if (lines[i].find(',') != std::string_view::npos && lines[i + 1].find(',') != std::string_view::npos) {
                start = i;
                break;
            }
        }
    }
    if (!start) {
        // A fenced block of one-column rows.
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (!is_fence(lines[i])) continue;
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                if (is_fence(lines[j])) {
                    start = i + 1;
                    expected = 1;
                    break;
                }
            }
            break;
        }
    }
    if (!start) throw ParseFailure("no CSV region found in reply", std::string(raw));

    const bool single_column = expected == 1;
    auto row_like = [&](std::string_view line) {
        if (is_fence(line) || is_blank(line)) return false;
        if (single_column) return starts_quoted(line);
        auto fields = csv::parse_record(text::trim(line));
        if (!fields) return quote_count(line) % 2 == 1;  // may open a multi-line field
        return expected > 1 ? fields->size() == expected : fields->size() >= 2;
    };
    auto next_content = [&](std::size_t i) -> std::optional<std::size_t> {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            if (!is_blank(lines[j])) return j;
        }
        return std::nullopt;
    };

    auto run_length = [&](std::size_t j) {
        std::size_t n = 0;
        while (j + n < lines.size() && !is_blank(lines[j + n]) && !is_fence(lines[j + n])) ++n;
        return n;
    };

    // Inside an opened fence, the next fence closes the table. Any other
    // fence is noise between rows.
    const bool fenced = std::count_if(lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(*start), is_fence) % 2 == 1;

    std::vector<Candidate> candidates;
    std::size_t quoted_rows = 0;
    for (std::size_t i = *start; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        if (is_fence(line)) {
            auto j = next_content(i);
            if (fenced || !j) break;
            diag(i, "stray code fence skipped");
            continue;
        }
        if (is_blank(line)) {
            // Unquoted one-column rows look like prose; a lone line after the
            // gap is taken as a closing remark.
            auto j = next_content(i);
            if (!j || !(row_like(lines[*j]) || (single_column && run_length(*j) >= 2))) break;
            continue;
        }

        const std::string_view trimmed = text::trim(line);
        std::optional<csv::Row> fields;
        std::size_t consumed = i;
        if (quote_count(trimmed) % 2 == 1) {
            std::string merged(trimmed);
            std::size_t quotes = quote_count(trimmed);
            for (std::size_t j = i + 1; j < lines.size() && j - i < kMaxMergedLines; ++j) {
                merged += '\n';
                merged += lines[j];
                quotes += quote_count(lines[j]);
                if (quotes % 2 == 0) {
                    std::string_view candidate = merged;
                    while (!candidate.empty() && (candidate.back() == ' ' || candidate.back() == '\t')) candidate.remove_suffix(1);
                    fields = csv::parse_record(candidate);
                    if (fields && expected > 1 && fields->size() != expected) fields.reset();
                    if (fields) consumed = j;
                    break;
                }
            }
        } else {
            fields = csv::parse_record(trimmed);
            if (fields && single_column && fields->size() > 1 && quote_count(trimmed) == 0) fields = csv::Row{std::string(trimmed)};
        }
        if (!fields) {
            diag(i, "malformed CSV line skipped");
            continue;
        }
        if (expected > 0 && fields->size() != expected) {
            diag(i, "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields->size()));
            i = consumed;
            continue;
        }
        const bool quoted = starts_quoted(trimmed);
        if (single_column && !quoted && candidates.size() >= 3 && quoted_rows * 2 > candidates.size()) {
            diag(i, "unquoted line among quoted rows skipped");
            continue;
        }
        quoted_rows += quoted ? 1 : 0;
        candidates.push_back({std::move(*fields), i, quoted});
        i = consumed;
    }

    // A short unquoted tail after an all-quoted column is a closing remark.
    if (single_column && !candidates.empty()) {
        std::size_t k = candidates.size();
        while (k > 0 && !candidates[k - 1].quoted) --k;
        const std::size_t tail = candidates.size() - k;
        if (tail >= 1 && tail <= 2 && k >= 1 && k == quoted_rows) {
            for (std::size_t t = k; t < candidates.size(); ++t) diag(candidates[t].line, "trailing prose skipped");
            candidates.resize(k);
        }
    }

    if (expected == 0 && !candidates.empty()) {
        std::map<std::size_t, std::size_t> counts;
        for (const Candidate& c : candidates) ++counts[c.fields.size()];
        expected = std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
                       return a.second < b.second || (a.second == b.second && a.first > b.first);
                   })->first;
    }
    for (Candidate& c : candidates) {
        if (c.fields.size() != expected) {
            diag(c.line, "expected " + std::to_string(expected) + " fields, got " + std::to_string(c.fields.size()));
            continue;
        }
        if (text::trim(c.fields[block.text_column]).empty()) {
            diag(c.line, "empty text field skipped");
            continue;
        }
        block.rows.push_back(std::move(c.fields));
    }
    if (block.rows.empty()) throw ParseFailure("no CSV rows recovered from reply", std::string(raw));
    return block;
}

}  // namespace toneforge
