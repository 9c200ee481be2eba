#include "scruple/text.hpp"

#include <cctype>

namespace scruple {

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> normalize_action_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (auto& t : tokenize(s)) {
        if (t == "the" || t == "a" || t == "an") continue;
        out.push_back(std::move(t));
    }
    return out;
}

std::string normalize_action(std::string_view s) {
    return join(normalize_action_tokens(s));
}

std::string join(const std::vector<std::string>& words, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i) out.append(sep);
        out.append(words[i]);
    }
    return out;
}

}  // namespace scruple
