#include "halodet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "halodet/errors.hpp"

namespace halodet {

namespace {

void check_bounds(std::span<const SpanAnnotation> spans, std::size_t answer_len) {
    for (const auto& s : spans) {
        if (s.start >= s.end || s.end > answer_len) {
            throw ValidationError("span (" + std::to_string(s.start) + ", " +
                                  std::to_string(s.end) + ") out of bounds for length " +
                                  std::to_string(answer_len));
        }
    }
}

// Sorted disjoint intervals covering the same character set.
std::vector<SpanAnnotation> canonical(std::span<const SpanAnnotation> spans) {
    std::vector<SpanAnnotation> sorted(spans.begin(), spans.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const SpanAnnotation& a, const SpanAnnotation& b) {
                  return a.start != b.start ? a.start < b.start : a.end < b.end;
              });
    std::vector<SpanAnnotation> merged;
    for (const auto& s : sorted) {
        if (!merged.empty() && s.start <= merged.back().end) {
            merged.back().end = std::max(merged.back().end, s.end);
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

std::size_t covered_chars(const std::vector<SpanAnnotation>& merged) {
    std::size_t n = 0;
    for (const auto& s : merged) n += s.end - s.start;
    return n;
}

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double iou(std::span<const SpanAnnotation> pred, std::span<const SpanAnnotation> gold,
           std::size_t answer_len) {
    check_bounds(pred, answer_len);
    check_bounds(gold, answer_len);

    const auto p = canonical(pred);
    const auto g = canonical(gold);
    const std::size_t p_chars = covered_chars(p);
    const std::size_t g_chars = covered_chars(g);
    if (p_chars == 0 && g_chars == 0) return 1.0;  // correct negative

    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < p.size() && j < g.size()) {
        const std::size_t lo = std::max(p[i].start, g[j].start);
        const std::size_t hi = std::min(p[i].end, g[j].end);
        if (lo < hi) inter += hi - lo;
        if (p[i].end < g[j].end) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = p_chars + g_chars - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> soft_char_probs(std::span<const SpanAnnotation> spans,
                                    std::size_t answer_len) {
    check_bounds(spans, answer_len);
    std::vector<double> sum(answer_len, 0.0);
    std::vector<std::size_t> count(answer_len, 0);
    for (const auto& s : spans) {
        const double prob = s.prob.value_or(1.0);
        for (std::size_t c = s.start; c < s.end; ++c) {
            sum[c] += prob;
            count[c] += 1;
        }
    }
    std::vector<double> out(answer_len, 0.0);
    for (std::size_t c = 0; c < answer_len; ++c) {
        if (count[c] > 0) out[c] = sum[c] / static_cast<double>(count[c]);
    }
    return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the average of ranks i+1..j+1
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const SpanAnnotation> pred_soft,
                std::span<const SpanAnnotation> gold_soft, std::size_t answer_len) {
    const std::vector<double> pred = soft_char_probs(pred_soft, answer_len);
    const std::vector<double> gold = soft_char_probs(gold_soft, answer_len);

    const bool pred_const = pred.empty() || is_constant(pred);
    const bool gold_const = gold.empty() || is_constant(gold);
    if (pred_const && gold_const) return 1.0;
    if (pred_const || gold_const) return 0.0;

    const std::vector<double> rp = average_ranks(pred);
    const std::vector<double> rg = average_ranks(gold);
    const double n = static_cast<double>(answer_len);
    double mp = 0.0, mg = 0.0;
    for (std::size_t c = 0; c < answer_len; ++c) {
        mp += rp[c];
        mg += rg[c];
    }
    mp /= n;
    mg /= n;
    double cov = 0.0, vp = 0.0, vg = 0.0;
    for (std::size_t c = 0; c < answer_len; ++c) {
        const double dp = rp[c] - mp;
        const double dg = rg[c] - mg;
        cov += dp * dg;
        vp += dp * dp;
        vg += dg * dg;
    }
    return cov / std::sqrt(vp * vg);
}

EvalReport aggregate(std::span<const InstanceScore> per_instance) {
    std::map<std::string, LangRow> by_lang;
    LangRow overall;
    overall.lang = "Overall";
    for (const auto& score : per_instance) {
        auto& row = by_lang[score.lang];
        row.lang = score.lang;
        row.iou += score.iou;
        row.spearman += score.spearman;
        row.count += 1;
        overall.iou += score.iou;
        overall.spearman += score.spearman;
        overall.count += 1;
    }

    EvalReport report;
    for (auto& [lang, row] : by_lang) {
        row.iou /= static_cast<double>(row.count);
        row.spearman /= static_cast<double>(row.count);
        report.per_language.push_back(row);
    }
    if (overall.count > 0) {
        overall.iou /= static_cast<double>(overall.count);
        overall.spearman /= static_cast<double>(overall.count);
    }
    report.overall = overall;
    return report;
}

}  // namespace halodet
