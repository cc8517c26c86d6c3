#include <doctest.h>

#include "halodet/errors.hpp"
#include "halodet/routing.hpp"
#include "halodet/types.hpp"
#include "support/oracles.hpp"

using namespace halodet;

namespace {

QAInstance instance_with(std::size_t answer_len) {
    QAInstance inst;
    inst.id = "t-1";
    inst.lang = "en";
    inst.question = "q?";
    inst.answer = std::string(answer_len, 'a');
    return inst;
}

}  // namespace

TEST_CASE("validate_instance accepts in-bounds spans") {
    QAInstance inst = instance_with(20);
    inst.gold_hard = std::vector<SpanAnnotation>{{0, 5, std::nullopt}};
    CHECK(&validate_instance(inst) == &inst);
}

TEST_CASE("validate_instance rejects out-of-bounds span") {
    QAInstance inst = instance_with(20);
    inst.gold_hard = std::vector<SpanAnnotation>{{18, 25, std::nullopt}};
    CHECK_THROWS_WITH_AS(validate_instance(inst),
                         doctest::Contains("span (18, 25)"), ValidationError);
}

TEST_CASE("validate_instance rejects probability outside [0,1]") {
    QAInstance inst = instance_with(20);
    inst.gold_soft = std::vector<SpanAnnotation>{{0, 5, 1.3}};
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
}

TEST_CASE("validate_instance rejects empty answer") {
    QAInstance inst = instance_with(0);
    CHECK_THROWS_WITH_AS(validate_instance(inst), doctest::Contains("empty answer"),
                         ValidationError);
}

TEST_CASE("validate_instance counts code points, not bytes") {
    QAInstance inst = instance_with(1);
    inst.answer = "中文";  // 2 code points, 6 bytes
    inst.gold_hard = std::vector<SpanAnnotation>{{0, 2, std::nullopt}};
    CHECK_NOTHROW(validate_instance(inst));
    inst.gold_hard = std::vector<SpanAnnotation>{{0, 3, std::nullopt}};
    CHECK_THROWS_AS(validate_instance(inst), ValidationError);
}

TEST_CASE("hyperparameter clamping") {
    HyperParams hp;
    hp.tau = 0.0;  // table lower bound: would divide by zero
    CHECK(clamp_hyperparams(hp).tau == kTauMin);
    hp.tau = 99.0;
    CHECK(clamp_hyperparams(hp).tau == kTauMax);
    hp.tau = 1.0;
    hp.beta = 1.5;
    CHECK_THROWS_AS(clamp_hyperparams(hp), ValidationError);
    hp.beta = 0.5;
    hp.sigma = -0.1;
    CHECK_THROWS_AS(clamp_hyperparams(hp), ValidationError);
}

TEST_CASE("model weights form a simplex on every construction path") {
    test::TestRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        std::vector<double> logits(n);
        for (auto& l : logits) l = rng.uniform(-30.0, 30.0);
        const double tau = rng.uniform(1e-3, 10.0);

        const ModelWeights weights = weights_from_logits(logits, tau);
        REQUIRE(weights.alphas.size() == n);
        double sum = 0.0;
        for (double a : weights.alphas) {
            REQUIRE(a >= 0.0);
            sum += a;
        }
        REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}
