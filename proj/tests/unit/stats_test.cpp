#include "chainbound/stats.hpp"

#include "doctest.h"

using namespace chainbound;

TEST_CASE("summary of a known sample") {
    // mean 30, sd sqrt(250); t(4, 0.975) = 2.7764451 (standard table value),
    // so the half-width is 2.7764451 * sqrt(250/5)
    const auto s = summarize({10.0, 20.0, 30.0, 40.0, 50.0});
    CHECK(s.n == 5);
    CHECK(s.mean == doctest::Approx(30.0));
    CHECK(s.sd == doctest::Approx(15.8113883));
    CHECK(s.ci95 == doctest::Approx(2.7764451 * 15.8113883 / 2.2360680).epsilon(1e-6));
}

TEST_CASE("single draw carries no spread") {
    const auto s = summarize({42.5});
    CHECK(s.n == 1);
    CHECK(s.mean == 42.5);
    CHECK(s.sd == 0.0);
    CHECK(s.ci95 == 0.0);
}

TEST_CASE("identical draws have zero spread") {
    const auto s = summarize({7.0, 7.0, 7.0, 7.0});
    CHECK(s.mean == doctest::Approx(7.0));
    CHECK(s.sd == doctest::Approx(0.0));
    CHECK(s.ci95 == doctest::Approx(0.0));
}

TEST_CASE("empty input is rejected") { CHECK_THROWS(summarize({})); }
