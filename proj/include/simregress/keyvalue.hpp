#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simregress/error.hpp"

namespace simregress {

/// Plain-text `key = value` documents with optional `[section]` headers.
/// Sections may repeat (e.g. one `[subsequence]` block per subsequence);
/// entries before the first header belong to an unnamed leading section.
/// `#` starts a comment when it is the first non-blank character of a line.
struct KeyValueSection {
    std::string name;
    std::size_t line = 0;
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> find(const std::string& key) const;
};

struct KeyValueDocument {
    std::vector<KeyValueSection> sections;

    const KeyValueSection& root() const { return sections.front(); }
    std::vector<const KeyValueSection*> all(const std::string& name) const;
    const KeyValueSection* first(const std::string& name) const;
};

/// Syntax errors are reported with `error_code` and the offending line.
KeyValueDocument parse_key_value(const std::string& text, ErrorCode error_code);

}  // namespace simregress
