#pragma once

#include <string>
#include <string_view>

namespace tokenledger::reports {

std::string html_escape(std::string_view text);

/// Converts the Markdown subset the reports emit (headings #-###, paragraphs,
/// **bold**, `code`, fenced blocks, "- " lists, pipe tables) into a complete
/// HTML document with an embedded stylesheet. The first heading becomes the
/// document title. Anything unrecognised is emitted as escaped paragraph text.
std::string markdown_to_html(std::string_view markdown);

}  // namespace tokenledger::reports
