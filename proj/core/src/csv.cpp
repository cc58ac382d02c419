#include "toneforge/csv.hpp"

namespace toneforge::csv {

std::string format_row(std::span<const std::string> fields) {
    std::string out;
    bool first = true;
    for (const std::string& field : fields) {
        if (!first) out += ',';
        first = false;
        if (field.find_first_of(",\"\r\n") == std::string::npos) {
            out += field;
            continue;
        }
        out += '"';
        for (char c : field) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
    }
    out += '\n';
    return out;
}

StrictResult parse_strict(std::string_view text) {
    StrictResult result;
    enum class State { field_start, unquoted, quoted, quote_seen };

    State state = State::field_start;
    Row row;
    std::string field;
    std::size_t line = 1;
    std::size_t row_line = 1;
    std::size_t quote_line = 1;
    bool row_open = false;

    auto fail = [&](const std::string& message) {
        result.error = StrictError{line, row.size(), message};
        return result;
    };
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        result.rows.push_back(ParsedRow{std::move(row), row_line});
        row.clear();
        row_open = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (!row_open) {
            row_open = true;
            row_line = line;
        }
        const bool crlf = c == '\r' && i + 1 < text.size() && text[i + 1] == '\n';
        switch (state) {
            case State::field_start:
            case State::unquoted:
                if (c == ',') {
                    end_field();
                    state = State::field_start;
                } else if (c == '\n' || crlf) {
                    if (crlf) ++i;
                    end_row();
                    ++line;
                    state = State::field_start;
                } else if (c == '"') {
                    if (state == State::unquoted) return fail("quote inside unquoted field");
                    quote_line = line;
                    state = State::quoted;
                } else if (c == '\r') {
                    return fail("bare carriage return outside quotes");
                } else {
                    field += c;
                    state = State::unquoted;
                }
                break;
            case State::quoted:
                if (c == '"') {
                    state = State::quote_seen;
                } else {
                    if (c == '\n') ++line;
                    field += c;
                }
                break;
            case State::quote_seen:
                if (c == '"') {
                    field += '"';
                    state = State::quoted;
                } else if (c == ',') {
                    end_field();
                    state = State::field_start;
                } else if (c == '\n' || crlf) {
                    if (crlf) ++i;
                    end_row();
                    ++line;
                    state = State::field_start;
                } else {
                    return fail("unexpected character after closing quote");
                }
                break;
        }
    }
    if (state == State::quoted) {
        line = quote_line;
        return fail("unterminated quoted field");
    }
    if (row_open) end_row();
    return result;
}

std::optional<Row> parse_record(std::string_view text) {
    if (text.empty()) return std::nullopt;
    StrictResult parsed = parse_strict(text);
    if (parsed.error || parsed.rows.size() != 1) return std::nullopt;
    return std::move(parsed.rows.front().fields);
}

}  // namespace toneforge::csv
