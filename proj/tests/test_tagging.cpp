#include <doctest.h>

#include <cmath>

#include "halodet/alignment.hpp"
#include "halodet/errors.hpp"
#include "halodet/tagging.hpp"
#include "halodet/templates.hpp"
#include "support/oracles.hpp"

using namespace halodet;

namespace {

WordScores scores_of(std::vector<double> h) {
    WordScores scores;
    scores.h = std::move(h);
    scores.divergence_term.assign(scores.h.size(), 0.0);
    scores.avg_term = scores.h;
    scores.beta = 0.0;
    return scores;
}

const ModelProfile kProposer{"proposer", "Proposer", {" Proposer"}, "synthetic", ""};

// proposer stub with a fixed reply (or a fixed failure)
class StubProposer : public Backend {
  public:
    explicit StubProposer(std::string reply) : reply_(std::move(reply)) {}
    explicit StubProposer(int) : fail_transport_(true) {}

    std::vector<ScoredToken> token_logprobs(const ModelProfile&, const std::string&) override {
        throw ProtocolError("not implemented");
    }
    std::map<std::string, double> next_token_logits(const ModelProfile&, const std::string&,
                                                    const std::vector<std::string>&) override {
        throw ProtocolError("not implemented");
    }
    std::string propose_span(const ModelProfile&, const std::string&, const WordSpan&,
                             const std::optional<std::string>&,
                             const std::optional<std::string>&, const std::string&) override {
        if (fail_transport_) throw TransportError("endpoint unreachable");
        if (reply_.empty()) throw EmptyResponseError("empty reply");
        return reply_;
    }

  private:
    std::string reply_;
    bool fail_transport_ = false;
};

std::vector<RawTaggedSpan> raw(std::initializer_list<RawTaggedSpan> spans) { return spans; }

}  // namespace

TEST_CASE("select_words threshold") {
    SUBCASE("constant scores select nothing") {
        for (double sigma : {0.0, 0.5, 2.0}) {
            CHECK(select_words(scores_of({3.0, 3.0, 3.0}), sigma).empty());
        }
    }
    SUBCASE("one outlier above mean + sigma*std") {
        // mean 2.5, popstd ~4.3301, threshold ~6.83
        const auto selected = select_words(scores_of({0, 0, 0, 10}), 1.0);
        CHECK(selected == std::vector<std::size_t>{3});
    }
    SUBCASE("sigma zero selects strictly above the mean") {
        const auto selected = select_words(scores_of({1, 2, 3}), 0.0);
        CHECK(selected == std::vector<std::size_t>{2});
    }
}

TEST_CASE("selection shrinks monotonically in sigma") {
    test::TestRng rng(2211);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> h(2 + rng.below(20));
        for (auto& v : h) v = rng.uniform(-2.0, 6.0);
        const auto scores = scores_of(h);

        const auto loose = select_words(scores, 0.0);
        const auto tight = select_words(scores, 2.0);
        for (std::size_t idx : tight) {
            REQUIRE(std::find(loose.begin(), loose.end(), idx) != loose.end());
        }
    }
}

TEST_CASE("word probability is the logistic of the score") {
    const auto scores = scores_of({0.0, 1.0, 40.0});
    CHECK(word_probability(scores, 0) == doctest::Approx(0.5));
    CHECK(word_probability(scores, 1) == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(word_probability(scores, 2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(word_probability(scores, 2) > word_probability(scores, 1));
}

TEST_CASE("tag_spans locates the proposed surface") {
    const std::string answer = "The last king was Philip II of Spain.";
    const auto words = segment_words(answer);
    // word index of "Philip"
    std::size_t philip = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].start == 18) philip = i;
    }
    const auto scores = scores_of(std::vector<double>(words.size(), 0.0));

    SUBCASE("surface present once") {
        StubProposer backend("Philip II");
        const auto spans = tag_spans(backend, kProposer, answer, words, {{philip}}, scores,
                                     kSpanTemplateV1);
        REQUIRE(spans.size() == 1);
        CHECK(spans[0].start == 18);
        CHECK(spans[0].end == 27);
        CHECK(spans[0].source_word == philip);
        CHECK(spans[0].prob == doctest::Approx(0.5));
    }
    SUBCASE("absent surface falls back to the focus word") {
        StubProposer backend("Charles II");
        const auto spans = tag_spans(backend, kProposer, answer, words, {{philip}}, scores,
                                     kSpanTemplateV1);
        REQUIRE(spans.size() == 1);
        CHECK(spans[0].start == words[philip].start);
        CHECK(spans[0].end == words[philip].end);
    }
    SUBCASE("empty reply falls back") {
        StubProposer backend("");
        const auto spans = tag_spans(backend, kProposer, answer, words, {{philip}}, scores,
                                     kSpanTemplateV1);
        REQUIRE(spans.size() == 1);
        CHECK(spans[0].start == words[philip].start);
    }
    SUBCASE("transport failure degrades instead of aborting") {
        StubProposer backend(0);
        const auto spans = tag_spans(backend, kProposer, answer, words, {{philip}}, scores,
                                     kSpanTemplateV1);
        REQUIRE(spans.size() == 1);
        CHECK(spans[0].start == words[philip].start);
    }
}

TEST_CASE("ambiguous surface resolves to the occurrence nearest the focus") {
    const std::string answer = "the king met another king today";
    const auto words = segment_words(answer);
    REQUIRE(words.size() == 6);
    const auto scores = scores_of(std::vector<double>(words.size(), 0.0));

    StubProposer backend("king");
    // focus on the second "king" (word index 4, chars 21..25)
    const auto spans =
        tag_spans(backend, kProposer, answer, words, {{4}}, scores, kSpanTemplateV1);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].start == 21);
    CHECK(spans[0].end == 25);
}

TEST_CASE("synthetic neighbor-window proposer echoes the window") {
    SyntheticPlan plan;
    plan.proposer_mode = ProposerMode::kNeighborWindow;
    SyntheticBackend backend(plan);

    const std::string answer = "alpha beta gamma delta";
    const auto words = segment_words(answer);
    const auto scores = scores_of(std::vector<double>(words.size(), 0.0));
    // focus "gamma": window spans "beta gamma delta"
    const auto spans =
        tag_spans(backend, kProposer, answer, words, {{2}}, scores, kSpanTemplateV1);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].start == 6);
    CHECK(spans[0].end == 22);
}

TEST_CASE("merge_soft averages overlaps per character") {
    SUBCASE("paper overlap rule: 0.4 and 0.8 average to 0.6") {
        const auto merged =
            merge_soft(raw({{0, 10, 0.4, 0}, {5, 15, 0.8, 1}}), 20);
        REQUIRE(merged.size() == 3);
        CHECK(merged[0] == SpanAnnotation{0, 5, 0.4});
        CHECK(merged[1] == SpanAnnotation{5, 10, 0.6000000000000001});  // (0.4+0.8)/2 in fp
        CHECK(merged[1].prob.value() == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(merged[2] == SpanAnnotation{10, 15, 0.8});
    }
    SUBCASE("single span passes through") {
        const auto merged = merge_soft(raw({{3, 8, 0.7, 0}}), 10);
        REQUIRE(merged.size() == 1);
        CHECK(merged[0] == SpanAnnotation{3, 8, 0.7});
    }
    SUBCASE("three overlapping spans average all probs") {
        const auto merged =
            merge_soft(raw({{2, 3, 0.3, 0}, {2, 3, 0.6, 1}, {2, 3, 0.9, 2}}), 5);
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].prob.value() == doctest::Approx(0.6).epsilon(1e-12));
    }
}

TEST_CASE("merge_hard unions characters into maximal intervals") {
    SUBCASE("overlap") {
        const auto merged = merge_hard(raw({{0, 5, 1, 0}, {3, 8, 1, 1}}));
        REQUIRE(merged.size() == 1);
        CHECK(merged[0] == SpanAnnotation{0, 8, std::nullopt});
    }
    SUBCASE("disjoint stay disjoint, sorted") {
        const auto merged = merge_hard(raw({{5, 7, 1, 1}, {0, 2, 1, 0}}));
        REQUIRE(merged.size() == 2);
        CHECK(merged[0] == SpanAnnotation{0, 2, std::nullopt});
        CHECK(merged[1] == SpanAnnotation{5, 7, std::nullopt});
    }
    SUBCASE("adjacent intervals merge under exclusive ends") {
        const auto merged = merge_hard(raw({{0, 5, 1, 0}, {5, 9, 1, 1}}));
        REQUIRE(merged.size() == 1);
        CHECK(merged[0] == SpanAnnotation{0, 9, std::nullopt});
    }
}

TEST_CASE("random span sets: soft equals the per-character oracle exactly") {
    test::TestRng rng(3322);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t answer_len = 5 + rng.below(60);
        std::vector<RawTaggedSpan> spans;
        const std::size_t n = rng.below(8);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t start = rng.below(answer_len);
            const std::size_t end = start + 1 + rng.below(answer_len - start);
            spans.push_back(RawTaggedSpan{start, end, rng.uniform(0.05, 1.0), i});
        }

        const auto soft = merge_soft(spans, answer_len);
        const auto oracle = test::oracle_soft_chars(spans, answer_len);

        std::vector<double> expanded(answer_len, 0.0);
        for (const auto& s : soft) {
            for (std::size_t c = s.start; c < s.end; ++c) expanded[c] = s.prob.value();
        }
        REQUIRE(expanded == oracle);  // exact

        // soft support == hard support
        const auto hard = merge_hard(spans);
        std::vector<char> hard_chars(answer_len, 0);
        for (const auto& s : hard) {
            for (std::size_t c = s.start; c < s.end; ++c) hard_chars[c] = 1;
        }
        for (std::size_t c = 0; c < answer_len; ++c) {
            REQUIRE(hard_chars[c] == (oracle[c] > 0.0 ? 1 : 0));
        }

        for (const auto& s : soft) {
            REQUIRE(s.prob.value() >= 0.0);
            REQUIRE(s.prob.value() <= 1.0);
        }
    }
}
