#include <doctest.h>

#include <cmath>

#include "halodet/errors.hpp"
#include "halodet/normalization.hpp"
#include "support/oracles.hpp"

using namespace halodet;

TEST_CASE("exclusion rule and population std") {
    // t_q = 8: exclude min(5, 6) = 5, statistics over [1, 2, 3]
    const std::vector<double> ppls = {9, 9, 9, 9, 9, 1, 2, 3};
    const NormParams params = question_norm_params(ppls);
    CHECK(params.mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(params.std == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(params.n_used == 3);
}

TEST_CASE("constant tail clamps the std") {
    // t_q = 4: exclude min(5, 2) = 2, statistics over [4, 4]
    const std::vector<double> ppls = {4, 4, 4, 4};
    const NormParams params = question_norm_params(ppls);
    CHECK(params.mean == doctest::Approx(4.0));
    CHECK(params.std == kStdClamp);
}

TEST_CASE("two-token boundary works, one-token errors") {
    // t_q = 2: min(5, 0) = 0 excluded, both tokens remain
    const std::vector<double> two = {1, 2};
    const NormParams params = question_norm_params(two);
    CHECK(params.mean == doctest::Approx(1.5));
    CHECK(params.std == doctest::Approx(0.5));

    const std::vector<double> one = {1};
    CHECK_THROWS_AS(question_norm_params(one), TooFewTokensError);
    CHECK_THROWS_AS(question_norm_params(std::vector<double>{}), TooFewTokensError);
}

TEST_CASE("normalize maps values and markers") {
    const NormParams params{2.0, std::sqrt(2.0 / 3.0), 3};
    CHECK(normalize_value(2.0, params) == doctest::Approx(0.0));
    CHECK(normalize_value(2.0 + params.std, params) == doctest::Approx(1.0));

    const std::vector<std::optional<double>> values = {2.0, std::nullopt};
    const auto out = normalize(std::span<const std::optional<double>>(values), params);
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == 0.0);  // no evidence resolves to the question mean
}

TEST_CASE("normalized included tokens have mean 0 and std 1") {
    test::TestRng rng(404);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t t_q = 2 + rng.below(40);
        std::vector<double> ppls(t_q);
        for (auto& v : ppls) v = rng.uniform(1.0, 200.0);

        const NormParams params = question_norm_params(ppls);
        const std::size_t excluded = std::min<std::size_t>(5, t_q > 2 ? t_q - 2 : 0);
        const auto z = normalize(std::span<const double>(ppls), params);

        double mean = 0.0;
        for (std::size_t i = excluded; i < t_q; ++i) mean += z[i];
        mean /= static_cast<double>(t_q - excluded);
        REQUIRE(std::fabs(mean) <= 1e-9);

        if (params.std > kStdClamp) {  // unclamped case
            double var = 0.0;
            for (std::size_t i = excluded; i < t_q; ++i) var += (z[i] - mean) * (z[i] - mean);
            var /= static_cast<double>(t_q - excluded);
            REQUIRE(std::fabs(std::sqrt(var) - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("affine invariance makes models comparable") {
    test::TestRng rng(808);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t t_q = 3 + rng.below(20);
        std::vector<double> ppls(t_q);
        for (auto& v : ppls) v = rng.uniform(1.0, 100.0);
        const double a = rng.uniform(0.1, 10.0);
        const double b = rng.uniform(-5.0, 5.0);

        std::vector<double> scaled(t_q);
        for (std::size_t i = 0; i < t_q; ++i) scaled[i] = a * ppls[i] + b;

        const NormParams p1 = question_norm_params(ppls);
        const NormParams p2 = question_norm_params(scaled);
        if (p1.std <= kStdClamp || p2.std <= kStdClamp) continue;

        const auto z1 = normalize(std::span<const double>(ppls), p1);
        const auto z2 = normalize(std::span<const double>(scaled), p2);
        for (std::size_t i = 0; i < t_q; ++i) {
            REQUIRE(z1[i] == doctest::Approx(z2[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("perturbing excluded tokens never changes the parameters") {
    test::TestRng rng(505);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t t_q = 3 + rng.below(30);
        std::vector<double> ppls(t_q);
        for (auto& v : ppls) v = rng.uniform(1.0, 50.0);

        const NormParams before = question_norm_params(ppls);
        const std::size_t excluded = std::min<std::size_t>(5, t_q - 2);
        if (excluded == 0) continue;
        ppls[rng.below(excluded)] = rng.uniform(1.0, 1e6);
        const NormParams after = question_norm_params(ppls);

        REQUIRE(before.mean == after.mean);  // exactly: excluded values are never read
        REQUIRE(before.std == after.std);
        REQUIRE(before.n_used == after.n_used);
    }
}
