#include "halodet/text.hpp"

#include <array>

#include "halodet/errors.hpp"

namespace halodet {

namespace {

// Decodes one code point starting at text[i]; advances i past it.
char32_t decode_one(std::string_view text, std::size_t& i) {
    const auto byte = [&](std::size_t k) -> unsigned char {
        return static_cast<unsigned char>(text[k]);
    };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        throw ParseError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > text.size()) {
        throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(i));
    }
    for (int k = 1; k < len; ++k) {
        unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) {
            throw ParseError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlong encodings and surrogates
    static constexpr std::array<char32_t, 5> min_for_len = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        throw ParseError("invalid UTF-8 scalar at offset " + std::to_string(i));
    }
    i += len;
    return cp;
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) out.push_back(decode_one(text, i));
    return out;
}

std::string encode_utf8(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) {
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            throw ParseError("invalid scalar value in encode_utf8");
        }
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
    return out;
}

std::size_t cp_length(std::string_view text) {
    std::size_t i = 0, n = 0;
    while (i < text.size()) {
        decode_one(text, i);
        ++n;
    }
    return n;
}

std::string cp_substr(std::string_view text, std::size_t cp_start, std::size_t cp_end) {
    if (cp_start > cp_end) throw ParseError("cp_substr: start > end");
    std::size_t i = 0, cp = 0;
    std::size_t byte_start = text.size(), byte_end = text.size();
    bool have_start = cp_start == 0;
    if (have_start) byte_start = 0;
    while (i < text.size() && cp < cp_end) {
        decode_one(text, i);
        ++cp;
        if (!have_start && cp == cp_start) {
            byte_start = i;
            have_start = true;
        }
        if (cp == cp_end) {
            byte_end = i;
            break;
        }
    }
    if (cp < cp_end || !have_start) throw ParseError("cp_substr: range exceeds text length");
    return std::string(text.substr(byte_start, byte_end - byte_start));
}

std::vector<std::size_t> byte_to_cp_map(std::string_view text) {
    std::vector<std::size_t> map(text.size() + 1, 0);
    std::size_t i = 0, cp = 0;
    while (i < text.size()) {
        std::size_t begin = i;
        decode_one(text, i);
        for (std::size_t b = begin; b < i; ++b) map[b] = cp;
        ++cp;
    }
    map[text.size()] = cp;
    return map;
}

std::size_t cp_offset_at_byte(std::string_view text, std::size_t byte_offset) {
    if (byte_offset > text.size()) {
        throw ParseError("byte offset " + std::to_string(byte_offset) + " beyond text size");
    }
    std::size_t i = 0, cp = 0;
    while (i < byte_offset) {
        decode_one(text, i);
        ++cp;
    }
    if (i != byte_offset) {
        throw ParseError("byte offset " + std::to_string(byte_offset) +
                         " falls inside a code point");
    }
    return cp;
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case 0x09:
        case 0x0A:
        case 0x0B:
        case 0x0C:
        case 0x0D:
        case 0x20:
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

}  // namespace halodet
