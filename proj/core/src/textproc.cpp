#include "rhymecheck/textproc.hpp"

#include <algorithm>

namespace rhymecheck {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point at `pos`, advancing it. Malformed bytes decode to kInvalid.
char32_t decode(std::string_view text, std::size_t& pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t extra;
    char32_t cp;
    if (lead < 0x80) {
        ++pos;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + extra >= text.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t i = 1; i <= extra; ++i) {
        const auto byte = static_cast<unsigned char>(text[pos + i]);
        if ((byte & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (byte & 0x3F);
    }
    pos += extra + 1;
    return cp;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

bool is_word_char(char32_t cp) {
    if (cp == kInvalid) return false;
    if (cp < 0x80) {
        return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9');
    }
    if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;     // Latin-1 symbols
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;                // punctuation, symbols, arrows
    if (cp >= 0x3000 && cp <= 0x303F) return false;                // CJK punctuation
    if (cp >= 0xFE10 && cp <= 0xFE6F) return false;
    if (cp == 0xFEFF) return false;
    if (cp >= 0xFF00 && cp <= 0xFF0F) return false;                // fullwidth punctuation
    if (cp >= 0xFF1A && cp <= 0xFF20) return false;
    if (cp >= 0xFF3B && cp <= 0xFF40) return false;
    if (cp >= 0xFF5B && cp <= 0xFF65) return false;
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;              // emoji and pictographs
    return true;
}

char32_t to_lower(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    if (cp < 0x80) return cp;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp >= 0x100 && cp <= 0x17F) {
        if (cp == 0x178) return 0xFF;
        const bool even_upper = (cp <= 0x137) || (cp >= 0x14A && cp <= 0x177);
        if (even_upper) return (cp % 2 == 0) ? cp + 1 : cp;
        if (cp == 0x130 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
        return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
    return cp;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    struct CodePoint {
        char32_t value;
        std::size_t begin;
        std::size_t end;
    };
    std::vector<CodePoint> cps;
    cps.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t begin = pos;
        const char32_t cp = decode(text, pos);
        cps.push_back({cp, begin, pos});
    }

    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (!is_word_char(cps[i].value)) {
            ++i;
            continue;
        }
        Token token;
        token.begin = cps[i].begin;
        while (i < cps.size()) {
            if (is_word_char(cps[i].value)) {
                encode(to_lower(cps[i].value), token.surface);
                token.end = cps[i].end;
                ++i;
            } else if (is_apostrophe(cps[i].value) && i + 1 < cps.size() && is_word_char(cps[i + 1].value)) {
                token.surface.push_back('\'');
                ++i;
            } else {
                break;
            }
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

bool is_valid_utf8(std::string_view text) {
    for (std::size_t pos = 0; pos < text.size();) {
        if (decode(text, pos) == kInvalid) return false;
    }
    return true;
}

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> words;
    for (auto& token : tokenize(text)) words.push_back(std::move(token.surface));
    return words;
}

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::L1: return "L1";
    case Scheme::L2: return "L2";
    case Scheme::L3: return "L3";
    case Scheme::FULL: return "FULL";
    }
    return "FULL";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
    if (text == "L1" || text == "L") return Scheme::L1;
    if (text == "L2" || text == "2L") return Scheme::L2;
    if (text == "L3" || text == "3L") return Scheme::L3;
    if (text == "FULL" || text == "F") return Scheme::FULL;
    return std::nullopt;
}

namespace {

std::size_t window(std::size_t line_count, Scheme scheme) {
    switch (scheme) {
    case Scheme::L1: return 1;
    case Scheme::L2: return 2;
    case Scheme::L3: return 3;
    case Scheme::FULL: break;
    }
    return std::max<std::size_t>(line_count, 1);
}

}  // namespace

std::size_t segment_count(std::size_t line_count, Scheme scheme) {
    const std::size_t k = window(line_count, scheme);
    return (line_count + k - 1) / k;
}

std::vector<Segment> segment(const Document& doc, Scheme scheme) {
    const std::size_t n = doc.lines.size();
    const std::size_t k = window(n, scheme);
    std::vector<Segment> segments;
    segments.reserve(segment_count(n, scheme));
    for (std::size_t lo = 0; lo < n; lo += k) {
        Segment seg;
        seg.doc_id = doc.id;
        seg.span = {lo, std::min(n, lo + k)};
        bool positive = false;
        for (std::size_t i = seg.span.lo; i < seg.span.hi; ++i) {
            if (i > seg.span.lo) seg.text.push_back('\n');
            seg.text += doc.lines[i].text;
            positive = positive || is_positive(doc.lines[i].label);
        }
        seg.label = label_from_bool(positive);
        segments.push_back(std::move(seg));
    }
    return segments;
}

}  // namespace rhymecheck
