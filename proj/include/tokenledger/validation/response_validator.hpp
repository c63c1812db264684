#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tokenledger::validation {

inline constexpr std::size_t kMaxSummaryChars = 1000;
inline constexpr std::size_t kMaxCommentBodyChars = 2000;
inline constexpr std::size_t kMaxComments = 50;

/// Appended to any field cut down to its limit.
inline constexpr std::string_view kEllipsis = "\xE2\x80\xA6";

enum class Severity { Critical, Major, Minor, Info };

std::string_view to_string(Severity severity);
/// Unknown strings (and case variants not in the vocabulary) map to Info.
Severity parse_severity(std::string_view text);

struct ReviewComment {
    std::string file;
    std::optional<std::int64_t> line;
    std::string body;
    Severity severity = Severity::Info;

    friend bool operator==(const ReviewComment&, const ReviewComment&) = default;
};

struct ReviewPayload {
    std::string summary;
    std::vector<ReviewComment> comments;

    friend bool operator==(const ReviewPayload&, const ReviewPayload&) = default;
};

enum class Flag {
    PreambleStripped,
    PostambleStripped,
    JsonExtractedFromFence,
    SummaryTruncated,
    CommentTruncated,
    CommentsCapped,
    ParseFailed,
};

std::string_view to_string(Flag flag);

struct ValidationOutcome {
    std::optional<ReviewPayload> payload;
    std::string raw;
    std::set<Flag> flags;

    bool clean() const { return flags.empty(); }
    bool has(Flag flag) const { return flags.count(flag) > 0; }
};

/// A named case-insensitive pattern used to recognise conversational filler.
struct FillerRule {
    std::string_view name;
    std::string_view pattern;
};

/// Six opener rules, matched against the text preceding the JSON.
std::span<const FillerRule> preamble_rules();
/// Closer rules, matched against the text following the JSON.
std::span<const FillerRule> postamble_rules();

/// First fenced block's interior (``` or ```json) when the fence opens
/// before any '{'; otherwise the first balanced {...} span, scanning with
/// JSON string awareness; otherwise nullopt.
std::optional<std::string> extract_json_block(std::string_view text);

/// Runs the cleanup pipeline: preamble strip, postamble strip, JSON block
/// extraction, structural validation, truncation, comment cap. Never throws;
/// failures show up as Flag::ParseFailed with the raw text preserved.
ValidationOutcome validate_review(std::string_view raw);

/// Compact JSON for a payload; the inverse of the structural validation step.
std::string serialize_payload(const ReviewPayload& payload);

/// Cuts to at most `max_chars` code points, ending in kEllipsis when cut.
std::string truncate_chars(std::string_view text, std::size_t max_chars, bool& truncated);

}  // namespace tokenledger::validation
