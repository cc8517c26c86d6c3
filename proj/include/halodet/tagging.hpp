#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "halodet/backend.hpp"
#include "halodet/types.hpp"

namespace halodet {

struct RawTaggedSpan {
    std::size_t start = 0;  // code-point offsets in the answer
    std::size_t end = 0;
    double prob = 0.0;
    std::size_t source_word = 0;
};

// Indices of words with h > mean(h) + sigma * popstd(h). Constant scores
// select nothing.
std::vector<std::size_t> select_words(const WordScores& scores, double sigma);

// logistic(h_i): the minimal monotone map of the unbounded score into [0,1].
// Rank order is preserved, so rank-based evaluation is unaffected.
double word_probability(const WordScores& scores, std::size_t word_index);

// One RawTaggedSpan per selected word. The proposer sees the answer, the
// focus word and its direct neighbors; its returned surface is located in
// the answer at the occurrence whose midpoint is nearest the focus word.
// Proposer failure or an unlocatable surface degrades that word to its own
// span instead of aborting the instance. Proposer calls run concurrently;
// results are assembled in word order.
std::vector<RawTaggedSpan> tag_spans(Backend& backend, const ModelProfile& proposer,
                                     const std::string& answer,
                                     std::span<const WordSpan> words,
                                     std::span<const std::size_t> selected,
                                     const WordScores& scores,
                                     std::string_view span_template,
                                     std::size_t max_concurrency = 4);

// Per-character probability = mean over the raw spans covering that
// character; output is the maximal runs of equal positive probability.
std::vector<SpanAnnotation> merge_soft(std::span<const RawTaggedSpan> spans,
                                       std::size_t answer_len);

// Union of the character sets as maximal disjoint intervals, sorted.
// Adjacent intervals merge (end is exclusive).
std::vector<SpanAnnotation> merge_hard(std::span<const RawTaggedSpan> spans);

}  // namespace halodet
