#include "halodet/alignment.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "halodet/errors.hpp"
#include "halodet/text.hpp"

namespace halodet {

double token_perplexity(double logprob) {
    if (!std::isfinite(logprob)) throw ValidationError("token logprob is not finite");
    if (logprob > 0.0) {
        throw ValidationError("token logprob " + std::to_string(logprob) + " is positive");
    }
    return std::exp(-logprob);
}

namespace {

enum class Kind { kWhitespace, kAlnum, kKatakana, kBreakEach, kExtend, kOther };

struct Range {
    char32_t lo, hi;
};

// Major alphabetic blocks (Latin, Greek, Cyrillic, Armenian, Hebrew, Arabic,
// Devanagari, Bengali, Hangul, fullwidth forms). Sorted.
constexpr std::array kLetterRanges = {
    Range{0x0041, 0x005A}, Range{0x0061, 0x007A}, Range{0x00AA, 0x00AA},
    Range{0x00B5, 0x00B5}, Range{0x00BA, 0x00BA}, Range{0x00C0, 0x00D6},
    Range{0x00D8, 0x00F6}, Range{0x00F8, 0x02AF}, Range{0x0370, 0x0373},
    Range{0x0376, 0x0377}, Range{0x037B, 0x037D}, Range{0x037F, 0x037F},
    Range{0x0386, 0x0386}, Range{0x0388, 0x03FF}, Range{0x0400, 0x052F},
    Range{0x0531, 0x0556}, Range{0x0560, 0x0588}, Range{0x05D0, 0x05EA},
    Range{0x05EF, 0x05F2}, Range{0x0620, 0x064A}, Range{0x066E, 0x066F},
    Range{0x0671, 0x06D3}, Range{0x06D5, 0x06D5}, Range{0x06E5, 0x06E6},
    Range{0x06EE, 0x06EF}, Range{0x06FA, 0x06FC}, Range{0x06FF, 0x06FF},
    Range{0x0750, 0x077F}, Range{0x0904, 0x0939}, Range{0x093D, 0x093D},
    Range{0x0950, 0x0950}, Range{0x0958, 0x0961}, Range{0x0971, 0x097F},
    Range{0x0985, 0x09B9}, Range{0x09BD, 0x09BD}, Range{0x09CE, 0x09CE},
    Range{0x09DC, 0x09E1}, Range{0x09F0, 0x09F1}, Range{0x1100, 0x11FF},
    Range{0x1E00, 0x1FFF}, Range{0x2C60, 0x2C7F}, Range{0xA720, 0xA7FF},
    Range{0xAC00, 0xD7A3}, Range{0xFB00, 0xFB06}, Range{0xFB50, 0xFDFF},
    Range{0xFE70, 0xFEFC}, Range{0xFF21, 0xFF3A}, Range{0xFF41, 0xFF5A},
};

constexpr std::array kDigitRanges = {
    Range{0x0030, 0x0039}, Range{0x0660, 0x0669}, Range{0x06F0, 0x06F9},
    Range{0x0966, 0x096F}, Range{0x09E6, 0x09EF}, Range{0xFF10, 0xFF19},
};

constexpr std::array kKatakanaRanges = {
    Range{0x30A1, 0x30FA}, Range{0x30FC, 0x30FF}, Range{0x31F0, 0x31FF},
    Range{0xFF66, 0xFF9D},
};

// Scripts where the default boundaries break after every character:
// CJK ideographs (plus radicals and compatibility blocks) and hiragana.
constexpr std::array kBreakEachRanges = {
    Range{0x2E80, 0x2FDF},   Range{0x3005, 0x3007},   Range{0x3041, 0x3096},
    Range{0x309B, 0x309F},   Range{0x3400, 0x4DBF},   Range{0x4E00, 0x9FFF},
    Range{0xF900, 0xFAFF},   Range{0x20000, 0x2A6DF}, Range{0x2A700, 0x2EBEF},
    Range{0x2F800, 0x2FA1F},
};

// Combining marks, variation selectors and zero-width joiners: they attach
// to whatever span is open.
constexpr std::array kExtendRanges = {
    Range{0x0300, 0x036F}, Range{0x0483, 0x0489}, Range{0x0591, 0x05BD},
    Range{0x05BF, 0x05BF}, Range{0x05C1, 0x05C2}, Range{0x05C4, 0x05C5},
    Range{0x05C7, 0x05C7}, Range{0x0610, 0x061A}, Range{0x064B, 0x065F},
    Range{0x0670, 0x0670}, Range{0x06D6, 0x06DC}, Range{0x06DF, 0x06E4},
    Range{0x06E7, 0x06E8}, Range{0x06EA, 0x06ED}, Range{0x0711, 0x0711},
    Range{0x0730, 0x074A}, Range{0x0900, 0x0903}, Range{0x093A, 0x093C},
    Range{0x093E, 0x094F}, Range{0x0951, 0x0957}, Range{0x0962, 0x0963},
    Range{0x0981, 0x0983}, Range{0x09BC, 0x09BC}, Range{0x09BE, 0x09CD},
    Range{0x09D7, 0x09D7}, Range{0x09E2, 0x09E3}, Range{0x1AB0, 0x1AFF},
    Range{0x1DC0, 0x1DFF}, Range{0x200C, 0x200D}, Range{0x20D0, 0x20FF},
    Range{0x3099, 0x309A}, Range{0xFE00, 0xFE0F},
};

template <std::size_t N>
bool in_ranges(char32_t cp, const std::array<Range, N>& ranges) {
    auto it = std::upper_bound(ranges.begin(), ranges.end(), cp,
                               [](char32_t v, const Range& r) { return v < r.lo; });
    return it != ranges.begin() && cp <= std::prev(it)->hi;
}

bool is_mid_letter(char32_t cp) { return cp == 0x0027 || cp == 0x2019 || cp == 0x00B7; }
bool is_mid_num(char32_t cp) { return cp == 0x002C || cp == 0x002E; }
bool is_letter(char32_t cp) { return in_ranges(cp, kLetterRanges); }
bool is_digit(char32_t cp) { return in_ranges(cp, kDigitRanges); }

Kind classify(char32_t cp) {
    if (is_whitespace(cp)) return Kind::kWhitespace;
    if (in_ranges(cp, kExtendRanges)) return Kind::kExtend;
    if (is_letter(cp) || is_digit(cp)) return Kind::kAlnum;
    if (in_ranges(cp, kKatakanaRanges)) return Kind::kKatakana;
    if (in_ranges(cp, kBreakEachRanges)) return Kind::kBreakEach;
    return Kind::kOther;
}

}  // namespace

std::vector<WordSpan> segment_words(std::string_view text) {
    const std::u32string cps = decode_utf8(text);
    const std::size_t n = cps.size();

    // next non-extend code point, or 0 at a hard stop
    auto next_solid = [&](std::size_t from) -> char32_t {
        for (std::size_t j = from; j < n; ++j) {
            if (classify(cps[j]) != Kind::kExtend) return cps[j];
        }
        return 0;
    };

    std::vector<WordSpan> words;
    std::size_t start = 0;
    Kind open = Kind::kWhitespace;  // kWhitespace doubles as "no open span"
    auto close = [&](std::size_t end) {
        if (open != Kind::kWhitespace && end > start) {
            words.push_back(WordSpan{start, end, false});
        }
        open = Kind::kWhitespace;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const char32_t cp = cps[i];
        Kind k = classify(cp);

        if (k == Kind::kWhitespace) {
            close(i);
            continue;
        }
        if (k == Kind::kExtend) {
            if (open == Kind::kWhitespace) {
                open = Kind::kOther;
                start = i;
            }
            continue;
        }
        // apostrophes between letters and separators between digits stay
        // inside the word
        if (open == Kind::kAlnum && ((is_mid_letter(cp) && is_letter(next_solid(i + 1))) ||
                                     (is_mid_num(cp) && is_digit(next_solid(i + 1))))) {
            continue;
        }
        if (k == Kind::kBreakEach) {
            close(i);
            open = Kind::kBreakEach;
            start = i;
            continue;
        }
        if (open == k && open != Kind::kBreakEach) continue;
        close(i);
        open = k;
        start = i;
    }
    close(n);
    return words;
}

WordAssignment assign_tokens(std::span<const WordSpan> words,
                             std::span<const ScoredToken> tokens) {
    WordAssignment assignment(words.size());
    std::size_t ti = 0;
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
        const auto& w = words[wi];
        while (ti < tokens.size() && tokens[ti].end <= w.start) ++ti;
        for (std::size_t tj = ti; tj < tokens.size() && tokens[tj].start < w.end; ++tj) {
            assignment[wi].push_back(tj);
        }
        if (assignment[wi].empty()) {
            throw CoverageError("word span [" + std::to_string(w.start) + ", " +
                                std::to_string(w.end) + ") overlaps no token");
        }
    }
    return assignment;
}

std::vector<std::optional<double>> aggregate_max(
    const WordAssignment& assignment, std::span<const std::optional<double>> token_values) {
    std::vector<std::optional<double>> out(assignment.size());
    for (std::size_t wi = 0; wi < assignment.size(); ++wi) {
        for (std::size_t tj : assignment[wi]) {
            const auto& v = token_values[tj];
            if (!v) continue;
            if (!out[wi] || *v > *out[wi]) out[wi] = *v;
        }
    }
    return out;
}

std::vector<std::optional<double>> align_and_aggregate(std::span<const WordSpan> words,
                                                       std::span<const ScoredToken> tokens) {
    const WordAssignment assignment = assign_tokens(words, tokens);
    std::vector<std::optional<double>> ppls(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].logprob) ppls[i] = token_perplexity(*tokens[i].logprob);
    }
    return aggregate_max(assignment, ppls);
}

}  // namespace halodet
