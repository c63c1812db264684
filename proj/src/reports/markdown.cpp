#include "tokenledger/reports/markdown.hpp"

#include <vector>

namespace tokenledger::reports {

namespace {

constexpr std::string_view kStylesheet = R"css(
body { font-family: -apple-system, "Segoe UI", Helvetica, Arial, sans-serif; color: #1f2328; margin: 0; background: #f6f8fa; }
main { max-width: 960px; margin: 2rem auto; padding: 2rem 2.5rem; background: #fff; border: 1px solid #d0d7de; border-radius: 6px; }
h1 { font-size: 1.8rem; border-bottom: 1px solid #d0d7de; padding-bottom: .3rem; }
h2 { font-size: 1.35rem; margin-top: 2rem; }
h3 { font-size: 1.1rem; }
table { border-collapse: collapse; margin: 1rem 0; width: 100%; }
th, td { border: 1px solid #d0d7de; padding: .35rem .7rem; text-align: left; }
th { background: #f6f8fa; }
tr:nth-child(even) td { background: #fbfcfd; }
code { font-family: ui-monospace, Menlo, Consolas, monospace; font-size: .9em; background: #eff1f3; padding: .1em .3em; border-radius: 4px; }
pre { background: #eff1f3; padding: .8rem; border-radius: 6px; overflow-x: auto; }
pre code { background: none; padding: 0; }
)css";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string bold(std::string escaped) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto open = escaped.find("**", pos);
        if (open == std::string::npos) break;
        const auto close = escaped.find("**", open + 2);
        if (close == std::string::npos || close == open + 2) break;
        out.append(escaped, pos, open - pos);
        out += "<strong>";
        out.append(escaped, open + 2, close - open - 2);
        out += "</strong>";
        pos = close + 2;
    }
    out.append(escaped, pos);
    return out;
}

std::string inline_html(std::string_view text) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find('`', pos);
        const auto close = open == std::string_view::npos ? open : text.find('`', open + 1);
        if (close == std::string_view::npos) {
            out += bold(html_escape(text.substr(pos)));
            break;
        }
        out += bold(html_escape(text.substr(pos, open - pos)));
        out += "<code>" + html_escape(text.substr(open + 1, close - open - 1)) + "</code>";
        pos = close + 1;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> table_cells(std::string_view line) {
    line = trim(line);
    if (starts_with(line, "|")) line.remove_prefix(1);
    if (!line.empty() && line.back() == '|') line.remove_suffix(1);
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto bar = line.find('|', pos);
        cells.push_back(trim(line.substr(pos, bar == std::string_view::npos ? bar : bar - pos)));
        if (bar == std::string_view::npos) break;
        pos = bar + 1;
    }
    return cells;
}

bool is_separator_row(std::string_view line) {
    line = trim(line);
    if (!starts_with(line, "|")) return false;
    for (const auto cell : table_cells(line)) {
        if (cell.empty()) return false;
        for (const char c : cell) {
            if (c != '-' && c != ':') return false;
        }
    }
    return true;
}

int heading_level(std::string_view line) {
    int level = 0;
    while (level < static_cast<int>(line.size()) && line[level] == '#') ++level;
    if (level < 1 || level > 3 || level >= static_cast<int>(line.size()) || line[level] != ' ') return 0;
    return level;
}

bool is_list_item(std::string_view line) { return starts_with(line, "- ") || starts_with(line, "* "); }

}  // namespace

std::string html_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string markdown_to_html(std::string_view markdown) {
    const auto lines = split_lines(markdown);
    std::string body;
    std::string title;
    std::vector<std::string_view> paragraph;

    const auto flush_paragraph = [&] {
        if (paragraph.empty()) return;
        body += "<p>";
        for (std::size_t i = 0; i < paragraph.size(); ++i) {
            if (i) body += "\n";
            body += inline_html(paragraph[i]);
        }
        body += "</p>\n";
        paragraph.clear();
    };

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = lines[i];
        const auto stripped = trim(line);

        if (starts_with(stripped, "```")) {
            flush_paragraph();
            body += "<pre><code>";
            for (++i; i < lines.size() && !starts_with(trim(lines[i]), "```"); ++i) {
                body += html_escape(lines[i]);
                body += "\n";
            }
            body += "</code></pre>\n";
            continue;
        }
        if (stripped.empty()) {
            flush_paragraph();
            continue;
        }
        if (const int level = heading_level(stripped)) {
            flush_paragraph();
            const auto text = trim(stripped.substr(level + 1));
            if (title.empty()) title = std::string(text);
            const auto tag = std::to_string(level);
            body += "<h" + tag + ">" + inline_html(text) + "</h" + tag + ">\n";
            continue;
        }
        if (starts_with(stripped, "|") && i + 1 < lines.size() && is_separator_row(lines[i + 1])) {
            flush_paragraph();
            body += "<table>\n<thead><tr>";
            for (const auto cell : table_cells(stripped)) body += "<th>" + inline_html(cell) + "</th>";
            body += "</tr></thead>\n<tbody>\n";
            for (i += 2; i < lines.size() && starts_with(trim(lines[i]), "|"); ++i) {
                body += "<tr>";
                for (const auto cell : table_cells(lines[i])) body += "<td>" + inline_html(cell) + "</td>";
                body += "</tr>\n";
            }
            body += "</tbody>\n</table>\n";
            --i;
            continue;
        }
        if (is_list_item(stripped)) {
            flush_paragraph();
            body += "<ul>\n";
            for (; i < lines.size() && is_list_item(trim(lines[i])); ++i) {
                body += "<li>" + inline_html(trim(lines[i]).substr(2)) + "</li>\n";
            }
            body += "</ul>\n";
            --i;
            continue;
        }
        paragraph.push_back(stripped);
    }
    flush_paragraph();

    std::string html = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
    html += html_escape(title.empty() ? std::string_view("Report") : std::string_view(title));
    html += "</title>\n<style>";
    html += kStylesheet;
    html += "</style>\n</head>\n<body>\n<main>\n";
    html += body;
    html += "</main>\n</body>\n</html>\n";
    return html;
}

}  // namespace tokenledger::reports
