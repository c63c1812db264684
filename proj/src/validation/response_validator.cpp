#include "tokenledger/validation/response_validator.hpp"

#include <algorithm>
#include <array>
#include <regex>

#include <nlohmann/json.hpp>

namespace tokenledger::validation {

namespace {

using nlohmann::json;

// Apostrophes may arrive as ASCII or U+2019.
#define TL_APOS "(?:'|\xE2\x80\x99)"

constexpr std::array<FillerRule, 6> kPreambleRules{{
    {"sure", R"(^\s*sure\b)"},
    {"here_is", R"(^\s*here(?:)" TL_APOS R"(s| is| are)\b)"},
    {"certainly", R"(^\s*certainly\b)"},
    {"of_course", R"(^\s*of course\b)"},
    {"i_will", R"(^\s*i(?:)" TL_APOS R"(ll| will)\b)"},
    {"okay", R"(^\s*ok(?:ay)?\b)"},
}};

constexpr std::array<FillerRule, 3> kPostambleRules{{
    {"note", R"(^\s*(?:\*\*|__)?note\s*:)"},
    {"feel_free_to_ask", R"(feel free to ask)"},
    {"hope_this_helps", R"(hope (?:this|that) helps)"},
}};

#undef TL_APOS

template <std::size_t N>
std::vector<std::regex> compile(const std::array<FillerRule, N>& rules) {
    std::vector<std::regex> out;
    out.reserve(N);
    for (const auto& rule : rules) {
        out.emplace_back(std::string(rule.pattern), std::regex::ECMAScript | std::regex::icase);
    }
    return out;
}

bool any_match(const std::vector<std::regex>& patterns, const std::string& text) {
    return std::any_of(patterns.begin(), patterns.end(),
                       [&](const std::regex& re) { return std::regex_search(text, re); });
}

const std::vector<std::regex>& preamble_patterns() {
    static const auto patterns = compile(kPreambleRules);
    return patterns;
}

const std::vector<std::regex>& postamble_patterns() {
    static const auto patterns = compile(kPostambleRules);
    return patterns;
}

constexpr std::string_view kFence = "```";

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

struct JsonBlock {
    std::string text;
    bool fenced = false;
};

std::optional<std::string> balanced_object(std::string_view text) {
    const auto start = text.find('{');
    if (start == std::string_view::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) {
                return std::string(text.substr(start, i - start + 1));
            }
        }
    }
    return std::nullopt;
}

std::optional<JsonBlock> find_json_block(std::string_view text) {
    const auto fence = text.find(kFence);
    const auto brace = text.find('{');
    if (fence != std::string_view::npos && (brace == std::string_view::npos || fence < brace)) {
        // Skip the info string ("json") on the opening fence line.
        const auto line_end = text.find('\n', fence);
        if (line_end != std::string_view::npos) {
            const auto interior_start = line_end + 1;
            // A closing fence sits at the start of a line.
            std::size_t close = text.substr(interior_start).rfind(kFence, 0) == 0
                                    ? interior_start
                                    : text.find("\n```", interior_start);
            if (close != std::string_view::npos) {
                if (close != interior_start) ++close;  // past the newline
                return JsonBlock{std::string(trim(text.substr(interior_start, close - interior_start))), true};
            }
        }
    }
    if (auto block = balanced_object(text)) {
        return JsonBlock{std::move(*block), false};
    }
    return std::nullopt;
}

/// Index of the first structural character ('{' or an opening fence).
std::size_t structural_start(std::string_view text) {
    return std::min(text.find('{'), text.find(kFence));
}

/// One past the last structural character ('}' or a closing fence).
std::optional<std::size_t> structural_end(std::string_view text) {
    std::optional<std::size_t> end;
    if (const auto brace = text.rfind('}'); brace != std::string_view::npos) end = brace + 1;
    if (const auto fence = text.rfind(kFence); fence != std::string_view::npos) {
        end = std::max(end.value_or(0), fence + kFence.size());
    }
    return end;
}

std::optional<ReviewPayload> to_payload(const json& doc) {
    if (!doc.is_object()) return std::nullopt;
    const auto summary = doc.find("summary");
    if (summary == doc.end() || !summary->is_string()) return std::nullopt;

    ReviewPayload payload;
    payload.summary = summary->get<std::string>();

    const auto comments = doc.find("comments");
    if (comments == doc.end() || comments->is_null()) return payload;
    if (!comments->is_array()) return std::nullopt;

    for (const auto& item : *comments) {
        if (!item.is_object()) return std::nullopt;
        const auto file = item.find("file");
        const auto body = item.find("body");
        if (file == item.end() || !file->is_string() || file->get_ref<const std::string&>().empty()) {
            return std::nullopt;
        }
        if (body == item.end() || !body->is_string() || body->get_ref<const std::string&>().empty()) {
            return std::nullopt;
        }
        ReviewComment comment;
        comment.file = file->get<std::string>();
        comment.body = body->get<std::string>();
        if (const auto line = item.find("line"); line != item.end() && line->is_number_integer()) {
            const auto value = line->get<std::int64_t>();
            if (value > 0) comment.line = value;
        }
        if (const auto sev = item.find("severity"); sev != item.end() && sev->is_string()) {
            comment.severity = parse_severity(sev->get_ref<const std::string&>());
        }
        payload.comments.push_back(std::move(comment));
    }
    return payload;
}

}  // namespace

std::string_view to_string(Severity severity) {
    switch (severity) {
        case Severity::Critical: return "critical";
        case Severity::Major: return "major";
        case Severity::Minor: return "minor";
        case Severity::Info: return "info";
    }
    return "info";
}

Severity parse_severity(std::string_view text) {
    std::string lowered(trim(text));
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "critical") return Severity::Critical;
    if (lowered == "major") return Severity::Major;
    if (lowered == "minor") return Severity::Minor;
    return Severity::Info;
}

std::string_view to_string(Flag flag) {
    switch (flag) {
        case Flag::PreambleStripped: return "preamble_stripped";
        case Flag::PostambleStripped: return "postamble_stripped";
        case Flag::JsonExtractedFromFence: return "json_extracted_from_fence";
        case Flag::SummaryTruncated: return "summary_truncated";
        case Flag::CommentTruncated: return "comment_truncated";
        case Flag::CommentsCapped: return "comments_capped";
        case Flag::ParseFailed: return "parse_failed";
    }
    return "parse_failed";
}

std::span<const FillerRule> preamble_rules() { return kPreambleRules; }
std::span<const FillerRule> postamble_rules() { return kPostambleRules; }

std::optional<std::string> extract_json_block(std::string_view text) {
    if (auto block = find_json_block(text)) return std::move(block->text);
    return std::nullopt;
}

std::string truncate_chars(std::string_view text, std::size_t max_chars, bool& truncated) {
    truncated = false;
    std::size_t chars = 0;
    std::size_t cut = std::string_view::npos;  // byte offset after (max_chars - 1) code points
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) continue;
        if (chars == max_chars - 1) cut = i;
        ++chars;
    }
    if (chars <= max_chars) return std::string(text);
    truncated = true;
    std::string out(text.substr(0, cut));
    out += kEllipsis;
    return out;
}

ValidationOutcome validate_review(std::string_view raw) {
    ValidationOutcome outcome;
    outcome.raw = std::string(raw);
    std::string text(raw);

    // 1. Conversational opener before the first '{' or fence.
    if (const auto start = structural_start(text); start != std::string::npos && start > 0) {
        if (any_match(preamble_patterns(), text.substr(0, start))) {
            text.erase(0, start);
            outcome.flags.insert(Flag::PreambleStripped);
        }
    }

    // 2. Sign-off after the last '}' or fence.
    if (const auto end = structural_end(text); end && *end < text.size()) {
        if (any_match(postamble_patterns(), text.substr(*end))) {
            text.erase(*end);
            outcome.flags.insert(Flag::PostambleStripped);
        }
    }

    // 3. Locate the JSON document.
    const auto block = find_json_block(text);
    if (!block) {
        outcome.flags.insert(Flag::ParseFailed);
        return outcome;
    }
    if (block->fenced) {
        outcome.flags.insert(Flag::JsonExtractedFromFence);
    }

    // 4. Parse and check structure.
    const json doc = json::parse(block->text, nullptr, false);
    auto payload = doc.is_discarded() ? std::nullopt : to_payload(doc);
    if (!payload) {
        outcome.flags.insert(Flag::ParseFailed);
        return outcome;
    }

    // 5. Truncate oversized fields.
    bool cut = false;
    payload->summary = truncate_chars(payload->summary, kMaxSummaryChars, cut);
    if (cut) outcome.flags.insert(Flag::SummaryTruncated);
    for (auto& comment : payload->comments) {
        comment.body = truncate_chars(comment.body, kMaxCommentBodyChars, cut);
        if (cut) outcome.flags.insert(Flag::CommentTruncated);
    }

    // 6. Cap the comment count.
    if (payload->comments.size() > kMaxComments) {
        payload->comments.resize(kMaxComments);
        outcome.flags.insert(Flag::CommentsCapped);
    }

    outcome.payload = std::move(payload);
    return outcome;
}

std::string serialize_payload(const ReviewPayload& payload) {
    json comments = json::array();
    for (const auto& comment : payload.comments) {
        json item{{"file", comment.file}};
        if (comment.line) item["line"] = *comment.line;
        item["body"] = comment.body;
        item["severity"] = std::string(to_string(comment.severity));
        comments.push_back(std::move(item));
    }
    json doc{{"summary", payload.summary}, {"comments", std::move(comments)}};
    return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace tokenledger::validation
