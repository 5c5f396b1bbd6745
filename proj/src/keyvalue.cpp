#include "simregress/keyvalue.hpp"

#include <sstream>

#include "simregress/text.hpp"

namespace simregress {

std::optional<std::string> KeyValueSection::find(const std::string& key) const {
    // Last assignment wins.
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        if (it->first == key) {
            return it->second;
        }
    }
    return std::nullopt;
}

std::vector<const KeyValueSection*> KeyValueDocument::all(const std::string& name) const {
    std::vector<const KeyValueSection*> out;
    for (const auto& s : sections) {
        if (s.name == name) {
            out.push_back(&s);
        }
    }
    return out;
}

const KeyValueSection* KeyValueDocument::first(const std::string& name) const {
    for (const auto& s : sections) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

KeyValueDocument parse_key_value(const std::string& text, ErrorCode error_code) {
    KeyValueDocument doc;
    doc.sections.push_back(KeyValueSection{"", 0, {}});

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw Error(error_code, "bad section header '" + std::string(line) + "'", line_no);
            }
            doc.sections.push_back(KeyValueSection{std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(error_code, "expected 'key = value', got '" + std::string(line) + "'", line_no);
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw Error(error_code, "empty key", line_no);
        }
        doc.sections.back().entries.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return doc;
}

}  // namespace simregress
