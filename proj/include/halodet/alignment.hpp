#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "halodet/types.hpp"

namespace halodet {

// exp(-logprob). Throws ValidationError for logprob > 0 or non-finite input.
double token_perplexity(double logprob);

// Splits text into word spans: letter/digit runs (apostrophes between
// letters and separators between digits stay inside the word), katakana
// runs, one span per CJK ideograph or hiragana character, and each
// punctuation run as its own word. Combining marks attach to the open span.
// This is a compact approximation of the Unicode default word boundaries
// covering the scripts of the target languages; whitespace is never inside
// a span and every non-whitespace code point lands in exactly one span.
std::vector<WordSpan> segment_words(std::string_view text);

// word index -> indices of tokens overlapping that word, sorted.
// A token straddling a boundary appears under every word it overlaps.
using WordAssignment = std::vector<std::vector<std::size_t>>;

// Throws CoverageError when a word overlaps no token (offset mismatch
// between the segmented text and the scored text).
WordAssignment assign_tokens(std::span<const WordSpan> words,
                             std::span<const ScoredToken> tokens);

// Per-word perplexity: max over the perplexities of overlapping tokens with
// a present logprob. A word whose every overlapping token is missing its
// logprob yields nullopt (no evidence).
std::vector<std::optional<double>> align_and_aggregate(std::span<const WordSpan> words,
                                                       std::span<const ScoredToken> tokens);

// Same max aggregation over arbitrary per-token values (used after
// normalization, where values are z-scores rather than raw perplexities).
std::vector<std::optional<double>> aggregate_max(
    const WordAssignment& assignment,
    std::span<const std::optional<double>> token_values);

}  // namespace halodet
