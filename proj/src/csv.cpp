#include "canopy/csv.hpp"

#include "canopy/text.hpp"

#include <fmt/format.h>

namespace canopy::csv {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && text::trim(cur).empty()) {
            quoted = true;
            was_quoted = true;
            cur.clear();
        } else if (c == ',') {
            cells.push_back(was_quoted ? cur : text::trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(was_quoted ? cur : text::trim(cur));
    return cells;
}

std::vector<std::vector<std::string>> parse(std::string_view content) {
    std::vector<std::vector<std::string>> rows;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line = nl == std::string_view::npos
                                    ? content.substr(pos)
                                    : content.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!text::trim(line).empty()) rows.push_back(split_line(line));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return rows;
}

std::string escape(std::string_view cell) {
    if (cell.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(cell);
    }
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_number(double value) {
    return fmt::format("{}", value);
}

} // namespace canopy::csv
