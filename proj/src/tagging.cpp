#include "halodet/tagging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "halodet/errors.hpp"
#include "halodet/parallel.hpp"
#include "halodet/templates.hpp"
#include "halodet/text.hpp"

namespace halodet {

namespace {

double population_std(std::span<const double> values, double mean) {
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size()));
}

// Occurrences of `needle` in `haystack`, as code-point offsets.
std::vector<std::size_t> find_occurrences(const std::u32string& haystack,
                                          const std::u32string& needle) {
    std::vector<std::size_t> hits;
    if (needle.empty() || needle.size() > haystack.size()) return hits;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::u32string::npos) {
        hits.push_back(pos);
        ++pos;
    }
    return hits;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::size_t> select_words(const WordScores& scores, double sigma) {
    if (scores.h.empty()) throw DimensionError("select_words over empty scores");
    double mean = 0.0;
    for (double v : scores.h) mean += v;
    mean /= static_cast<double>(scores.h.size());
    const double threshold = mean + sigma * population_std(scores.h, mean);

    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < scores.h.size(); ++i) {
        if (scores.h[i] > threshold) selected.push_back(i);
    }
    return selected;
}

double word_probability(const WordScores& scores, std::size_t word_index) {
    return 1.0 / (1.0 + std::exp(-scores.h.at(word_index)));
}

std::vector<RawTaggedSpan> tag_spans(Backend& backend, const ModelProfile& proposer,
                                     const std::string& answer,
                                     std::span<const WordSpan> words,
                                     std::span<const std::size_t> selected,
                                     const WordScores& scores,
                                     std::string_view span_template,
                                     std::size_t max_concurrency) {
    const std::u32string answer_cps = decode_utf8(answer);

    std::vector<RawTaggedSpan> out(selected.size());
    detail::parallel_for(selected.size(), max_concurrency, [&](std::size_t k) {
        const std::size_t wi = selected[k];
        const WordSpan& focus = words[wi];
        RawTaggedSpan span{focus.start, focus.end, word_probability(scores, wi), wi};

        const std::string focus_text = cp_substr(answer, focus.start, focus.end);
        std::optional<std::string> left, right;
        if (wi > 0) left = cp_substr(answer, words[wi - 1].start, words[wi - 1].end);
        if (wi + 1 < words.size()) {
            right = cp_substr(answer, words[wi + 1].start, words[wi + 1].end);
        }
        const std::string prompt =
            render_template(span_template, {{"answer", answer},
                                            {"left", left.value_or("")},
                                            {"focus", focus_text},
                                            {"right", right.value_or("")}});

        // a failed word degrades to its own span rather than aborting the
        // instance
        try {
            const std::string surface =
                trimmed(backend.propose_span(proposer, answer, focus, left, right, prompt));
            const auto hits = find_occurrences(answer_cps, decode_utf8(surface));
            if (!hits.empty()) {
                const double focus_mid =
                    (static_cast<double>(focus.start) + static_cast<double>(focus.end)) / 2.0;
                const std::size_t len = cp_length(surface);
                std::size_t best = hits.front();
                double best_dist = -1.0;
                for (std::size_t hit : hits) {
                    const double mid = static_cast<double>(hit) + static_cast<double>(len) / 2.0;
                    const double dist = std::fabs(mid - focus_mid);
                    if (best_dist < 0.0 || dist < best_dist) {
                        best_dist = dist;
                        best = hit;
                    }
                }
                span.start = best;
                span.end = best + len;
            }
        } catch (const Error&) {
            // fall back to the focus word span
        }
        out[k] = span;
    });
    return out;
}

std::vector<SpanAnnotation> merge_soft(std::span<const RawTaggedSpan> spans,
                                       std::size_t answer_len) {
    std::vector<double> sum(answer_len, 0.0);
    std::vector<std::size_t> count(answer_len, 0);
    for (const auto& s : spans) {
        if (s.start >= s.end || s.end > answer_len) {
            throw ValidationError("raw span (" + std::to_string(s.start) + ", " +
                                  std::to_string(s.end) + ") out of bounds");
        }
        for (std::size_t c = s.start; c < s.end; ++c) {
            sum[c] += s.prob;
            count[c] += 1;
        }
    }

    std::vector<SpanAnnotation> out;
    std::size_t c = 0;
    while (c < answer_len) {
        if (count[c] == 0) {
            ++c;
            continue;
        }
        const double prob = sum[c] / static_cast<double>(count[c]);
        std::size_t run_end = c + 1;
        while (run_end < answer_len && count[run_end] != 0 &&
               sum[run_end] / static_cast<double>(count[run_end]) == prob) {
            ++run_end;
        }
        if (prob > 0.0) out.push_back(SpanAnnotation{c, run_end, prob});
        c = run_end;
    }
    return out;
}

std::vector<SpanAnnotation> merge_hard(std::span<const RawTaggedSpan> spans) {
    std::vector<SpanAnnotation> intervals;
    intervals.reserve(spans.size());
    for (const auto& s : spans) {
        if (s.start >= s.end) {
            throw ValidationError("raw span (" + std::to_string(s.start) + ", " +
                                  std::to_string(s.end) + ") is empty or inverted");
        }
        intervals.push_back(SpanAnnotation{s.start, s.end, std::nullopt});
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const SpanAnnotation& a, const SpanAnnotation& b) {
                  return a.start != b.start ? a.start < b.start : a.end < b.end;
              });

    std::vector<SpanAnnotation> out;
    for (const auto& s : intervals) {
        if (!out.empty() && s.start <= out.back().end) {
            out.back().end = std::max(out.back().end, s.end);
        } else {
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace halodet
