#include <doctest.h>

#include <cmath>

#include "halodet/errors.hpp"
#include "halodet/pipeline.hpp"
#include "halodet/text.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace halodet;

TEST_CASE("detect recovers a planted span end to end") {
    auto corpus = test::make_corpus(1, 42);
    SyntheticBackend backend(corpus.plans);
    const QAInstance& inst = corpus.instances[0];

    const DetectionResult result = detect_instance(backend, corpus.config, inst);

    REQUIRE(inst.gold_hard.has_value());
    const SpanAnnotation& gold = (*inst.gold_hard)[0];
    REQUIRE(result.prediction.hard.size() == 1);
    CHECK(result.prediction.hard[0].start == gold.start);
    CHECK(result.prediction.hard[0].end == gold.end);

    REQUIRE(!result.prediction.soft.empty());
    for (const auto& span : result.prediction.soft) {
        CHECK(span.prob.value() > 0.5);  // planted words score far above the mean
    }

    // matrix shape follows answer words x ensemble
    const InstanceArtifacts artifacts = compute_artifacts(backend, corpus.config, inst);
    CHECK(artifacts.matrix.words.size() == artifacts.answer_words.size());
    CHECK(artifacts.matrix.models.size() == corpus.config.ensemble.size());
    CHECK(artifacts.router_logits.size() == corpus.config.ensemble.size());
}

TEST_CASE("cached artifacts reproduce the fresh run exactly") {
    auto corpus = test::make_corpus(6, 99);
    SyntheticBackend backend(corpus.plans);

    for (const auto& inst : corpus.instances) {
        const DetectionResult fresh = detect_instance(backend, corpus.config, inst);
        const InstanceArtifacts artifacts = compute_artifacts(backend, corpus.config, inst);
        const DetectionResult cached =
            detect_from_artifacts(backend, corpus.config, inst, artifacts, corpus.config.hp);

        REQUIRE(fresh.prediction == cached.prediction);
        REQUIRE(fresh.scores.h.size() == cached.scores.h.size());
        for (std::size_t i = 0; i < fresh.scores.h.size(); ++i) {
            REQUIRE(std::fabs(fresh.scores.h[i] - cached.scores.h[i]) <= 1e-9);
        }
        for (std::size_t j = 0; j < fresh.weights.alphas.size(); ++j) {
            REQUIRE(std::fabs(fresh.weights.alphas[j] - cached.weights.alphas[j]) <= 1e-9);
        }
    }
}

TEST_CASE("concurrency level does not change results") {
    auto corpus = test::make_corpus(3, 7);
    SyntheticBackend backend(corpus.plans);

    PipelineConfig serial = corpus.config;
    serial.max_concurrency = 1;
    PipelineConfig wide = corpus.config;
    wide.max_concurrency = 8;

    for (const auto& inst : corpus.instances) {
        const auto a = detect_instance(backend, serial, inst);
        const auto b = detect_instance(backend, wide, inst);
        REQUIRE(a.prediction == b.prediction);
    }
}

TEST_CASE("word scores decompose against the stored terms") {
    auto corpus = test::make_corpus(2, 5);
    SyntheticBackend backend(corpus.plans);
    for (const auto& inst : corpus.instances) {
        const auto result = detect_instance(backend, corpus.config, inst);
        const WordScores& s = result.scores;
        for (std::size_t i = 0; i < s.h.size(); ++i) {
            REQUIRE(std::fabs(s.h[i] - (s.beta * s.divergence_term[i] +
                                        (1.0 - s.beta) * s.avg_term[i])) <= 1e-9);
        }
    }
}

TEST_CASE("instances that cannot be normalized fail with a named error") {
    auto corpus = test::make_corpus(1, 3);
    QAInstance inst = corpus.instances[0];
    inst.question = "Hm";  // question region yields a single usable token at best
    SyntheticBackend backend(corpus.plans);
    CHECK_THROWS_AS(detect_instance(backend, corpus.config, inst), TooFewTokensError);
}

TEST_CASE("tiny ensembles are rejected") {
    auto corpus = test::make_corpus(1, 3);
    PipelineConfig config = corpus.config;
    config.ensemble.resize(1);
    SyntheticBackend backend(corpus.plans);
    CHECK_THROWS_AS(detect_instance(backend, config, corpus.instances[0]), DimensionError);
}
