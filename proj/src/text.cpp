#include "canopy/text.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace canopy::text {

namespace {

bool is_space(unsigned char c) {
    return std::isspace(c) != 0;
}

// Two-byte UTF-8 uppercase -> lowercase pairs for Azerbaijani Latin.
struct Utf8Pair {
    std::array<unsigned char, 2> upper;
    std::array<unsigned char, 2> lower;
};

constexpr Utf8Pair kAzPairs[] = {
    {{0xC6, 0x8F}, {0xC9, 0x99}}, // Ə -> ə
    {{0xC3, 0x87}, {0xC3, 0xA7}}, // Ç -> ç
    {{0xC5, 0x9E}, {0xC5, 0x9F}}, // Ş -> ş
    {{0xC4, 0x9E}, {0xC4, 0x9F}}, // Ğ -> ğ
    {{0xC3, 0x96}, {0xC3, 0xB6}}, // Ö -> ö
    {{0xC3, 0x9C}, {0xC3, 0xBC}}, // Ü -> ü
};

} // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            // İ (C4 B0) lowers to plain ASCII 'i'; handled below with the
            // two-byte pairs. ASCII itself:
            out.push_back(static_cast<char>(std::tolower(c)));
            ++i;
            continue;
        }
        if (i + 1 < s.size()) {
            unsigned char c2 = static_cast<unsigned char>(s[i + 1]);
            if (c == 0xC4 && c2 == 0xB0) { // İ
                out.push_back('i');
                i += 2;
                continue;
            }
            bool mapped = false;
            for (const auto& p : kAzPairs) {
                if (c == p.upper[0] && c2 == p.upper[1]) {
                    out.push_back(static_cast<char>(p.lower[0]));
                    out.push_back(static_cast<char>(p.lower[1]));
                    i += 2;
                    mapped = true;
                    break;
                }
            }
            if (mapped) continue;
        }
        out.push_back(static_cast<char>(c));
        ++i;
    }
    return out;
}

std::string normalize_label(std::string_view s) {
    std::string lowered = lower(trim(s));
    std::string out;
    out.reserve(lowered.size());
    bool in_space = false;
    for (char ch : lowered) {
        if (is_space(static_cast<unsigned char>(ch))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(ch);
    }
    return out;
}

std::vector<std::string> tokens(std::string_view s) {
    std::string norm = normalize_label(s);
    std::vector<std::string> out;
    std::string cur;
    for (char ch : norm) {
        unsigned char c = static_cast<unsigned char>(ch);
        bool word = c >= 0x80 || std::isalnum(c) != 0;
        if (word) {
            cur.push_back(ch);
        } else if (!cur.empty()) {
            out.push_back(std::exchange(cur, {}));
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

} // namespace canopy::text
