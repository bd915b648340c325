#pragma once

#include <map>
#include <string>
#include <string_view>

#include "spscan/corpus.hpp"

namespace spscan::prompts {

// Replaces {{KEY}} markers; throws if a marker in the template has no
// substitution or a substitution goes unused.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& subs);

// One "[index] text" line per sentence of [begin, end); text is whitespace-
// collapsed so a sentence is always a single line.
std::string render_sentences(const Document& doc, int64_t begin, int64_t end);

}  // namespace spscan::prompts
