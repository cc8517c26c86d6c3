#include <doctest.h>

#include <cmath>

#include "halodet/errors.hpp"
#include "halodet/metrics.hpp"
#include "support/oracles.hpp"

using namespace halodet;

namespace {

std::vector<SpanAnnotation> hard(std::initializer_list<std::pair<std::size_t, std::size_t>> spans) {
    std::vector<SpanAnnotation> out;
    for (const auto& [s, e] : spans) out.push_back(SpanAnnotation{s, e, std::nullopt});
    return out;
}

std::vector<SpanAnnotation> random_spans(test::TestRng& rng, std::size_t answer_len,
                                         std::size_t max_spans, bool with_prob) {
    std::vector<SpanAnnotation> spans;
    const std::size_t n = rng.below(max_spans + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t start = rng.below(answer_len);
        const std::size_t end = start + 1 + rng.below(answer_len - start);
        spans.push_back(SpanAnnotation{
            start, end, with_prob ? std::optional<double>(rng.uniform(0.0, 1.0)) : std::nullopt});
    }
    return spans;
}

}  // namespace

TEST_CASE("iou reference cases") {
    CHECK(iou(hard({{2, 7}}), hard({{2, 7}}), 10) == 1.0);
    CHECK(iou(hard({{0, 5}}), hard({{5, 10}}), 10) == 0.0);
    CHECK(iou(hard({{0, 10}}), hard({{5, 15}}), 20) == doctest::Approx(5.0 / 15.0));
    CHECK(iou({}, {}, 10) == 1.0);  // correct negative
    CHECK(iou(hard({{0, 5}}), {}, 10) == 0.0);
    CHECK_THROWS_AS(iou(hard({{0, 11}}), {}, 10), ValidationError);
}

TEST_CASE("iou is symmetric, bounded, and exact against the oracle") {
    test::TestRng rng(4040);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t answer_len = 4 + rng.below(50);
        const auto pred = random_spans(rng, answer_len, 5, false);
        const auto gold = random_spans(rng, answer_len, 5, false);

        const double got = iou(pred, gold, answer_len);
        REQUIRE(got == test::oracle_iou(pred, gold, answer_len));  // exact
        REQUIRE(got == iou(gold, pred, answer_len));
        REQUIRE(got >= 0.0);
        REQUIRE(got <= 1.0);
        REQUIRE(iou(pred, pred, answer_len) == 1.0);
    }
}

TEST_CASE("average ranks with ties") {
    const std::vector<double> values = {0.1, 0.1, 0.9, 0.9};
    CHECK(average_ranks(values) == std::vector<double>{1.5, 1.5, 3.5, 3.5});
    const std::vector<double> distinct = {3.0, 1.0, 2.0};
    CHECK(average_ranks(distinct) == std::vector<double>{3.0, 1.0, 2.0});
}

TEST_CASE("spearman reference cases") {
    SUBCASE("identical non-constant vectors correlate perfectly") {
        const auto spans = std::vector<SpanAnnotation>{{1, 3, 0.8}};
        CHECK(spearman(spans, spans, 5) == doctest::Approx(1.0));
    }
    SUBCASE("perfect inversion over distinct values") {
        const std::vector<SpanAnnotation> pred = {{0, 1, 0.1}, {1, 2, 0.3}, {2, 3, 0.6},
                                                  {3, 4, 0.9}};
        const std::vector<SpanAnnotation> gold = {{0, 1, 0.9}, {1, 2, 0.6}, {2, 3, 0.3},
                                                  {3, 4, 0.1}};
        CHECK(spearman(pred, gold, 4) == doctest::Approx(-1.0));
    }
    SUBCASE("tie handling, frozen against the counting-rank oracle") {
        // chars: pred (0.1, 0.1, 0.9, 0.9), gold (0, 0, 1, 0.5)
        const std::vector<SpanAnnotation> pred = {{0, 2, 0.1}, {2, 4, 0.9}};
        const std::vector<SpanAnnotation> gold = {{2, 3, 1.0}, {3, 4, 0.5}};
        const double got = spearman(pred, gold, 4);
        // ranks (1.5, 1.5, 3.5, 3.5) vs (1.5, 1.5, 4, 3): 4 / sqrt(18)
        CHECK(got == doctest::Approx(0.9428090415820635).epsilon(1e-12));
        const std::vector<double> pv = {0.1, 0.1, 0.9, 0.9};
        const std::vector<double> gv = {0.0, 0.0, 1.0, 0.5};
        CHECK(got == doctest::Approx(test::oracle_spearman_vectors(pv, gv)).epsilon(1e-12));
    }
    SUBCASE("constant-vector conventions") {
        CHECK(spearman({}, {}, 6) == 1.0);  // both constant (all zeros)
        const std::vector<SpanAnnotation> flat = {{0, 6, 0.5}};
        CHECK(spearman(flat, flat, 6) == 1.0);
        const std::vector<SpanAnnotation> varied = {{0, 3, 0.5}};
        CHECK(spearman(flat, varied, 6) == 0.0);  // exactly one constant
    }
}

TEST_CASE("spearman matches the independent oracle on random soft labels") {
    test::TestRng rng(5050);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t answer_len = 4 + rng.below(40);
        const auto pred = random_spans(rng, answer_len, 4, true);
        const auto gold = random_spans(rng, answer_len, 4, true);

        const auto pv = soft_char_probs(pred, answer_len);
        const auto gv = soft_char_probs(gold, answer_len);
        const bool pc = std::all_of(pv.begin(), pv.end(), [&](double v) { return v == pv[0]; });
        const bool gc = std::all_of(gv.begin(), gv.end(), [&](double v) { return v == gv[0]; });

        const double got = spearman(pred, gold, answer_len);
        if (pc && gc) {
            REQUIRE(got == 1.0);
        } else if (pc || gc) {
            REQUIRE(got == 0.0);
        } else {
            REQUIRE(std::fabs(got - test::oracle_spearman_vectors(pv, gv)) <= 1e-9);
            REQUIRE(got >= -1.0 - 1e-12);
            REQUIRE(got <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("spearman is invariant under strictly increasing transforms") {
    test::TestRng rng(6060);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t answer_len = 6 + rng.below(30);
        const auto pred = random_spans(rng, answer_len, 4, true);
        const auto gold = random_spans(rng, answer_len, 4, true);

        // logistic transform of pred probabilities (the tagging module's map)
        std::vector<SpanAnnotation> squashed = pred;
        for (auto& s : squashed) s.prob = 1.0 / (1.0 + std::exp(-*s.prob));

        // the transform must be applied to per-char values to commute with
        // overlap averaging, so restrict to non-overlapping prediction sets
        std::vector<char> seen(answer_len, 0);
        bool overlapping = false;
        for (const auto& s : pred) {
            for (std::size_t c = s.start; c < s.end; ++c) {
                if (seen[c]) overlapping = true;
                seen[c] = 1;
            }
        }
        if (overlapping) continue;
        // uncovered chars stay 0 and the logistic keeps covered values above
        // 0, so the rank vector is unchanged

        const double a = spearman(pred, gold, answer_len);
        const double b = spearman(squashed, gold, answer_len);
        REQUIRE(a == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("aggregate means per language and overall") {
    SUBCASE("single instance") {
        const auto report = aggregate(std::vector<InstanceScore>{{"it", 0.5, 0.4}});
        REQUIRE(report.per_language.size() == 1);
        CHECK(report.per_language[0].lang == "it");
        CHECK(report.per_language[0].iou == doctest::Approx(0.5));
        CHECK(report.per_language[0].spearman == doctest::Approx(0.4));
        CHECK(report.overall.iou == doctest::Approx(0.5));
    }
    SUBCASE("two instances of one language") {
        const auto report =
            aggregate(std::vector<InstanceScore>{{"en", 0.2, 0.0}, {"en", 0.4, 0.2}});
        REQUIRE(report.per_language.size() == 1);
        CHECK(report.per_language[0].iou == doctest::Approx(0.3));
        CHECK(report.per_language[0].spearman == doctest::Approx(0.1));
        CHECK(report.per_language[0].count == 2);
    }
    SUBCASE("empty input") {
        const auto report = aggregate({});
        CHECK(report.per_language.empty());
        CHECK(report.overall.count == 0);
    }
    SUBCASE("mixed languages sorted with overall over instances") {
        const auto report = aggregate(std::vector<InstanceScore>{
            {"fr", 1.0, 1.0}, {"ar", 0.0, 0.0}, {"fr", 0.5, 0.5}});
        REQUIRE(report.per_language.size() == 2);
        CHECK(report.per_language[0].lang == "ar");
        CHECK(report.per_language[1].lang == "fr");
        CHECK(report.per_language[1].iou == doctest::Approx(0.75));
        CHECK(report.overall.iou == doctest::Approx(0.5));
        CHECK(report.overall.count == 3);
    }
}
