#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lar/error.hpp"
#include "lar/smoothing.hpp"

using lar::SmoothingState;

TEST_CASE("alpha = 1 passes the stream through") {
    SmoothingState s(1.0);
    for (double x : {3.0, -1.0, 7.5, 0.25}) CHECK(s.update(x) == x);
}

TEST_CASE("direct substitution") {
    SmoothingState s(0.5);
    s.update(0.0);
    CHECK(s.update(2.0) == 1.0);
}

TEST_CASE("bad alpha") {
    for (double a : {0.0, -0.1, 1.5, std::nan("")}) {
        try {
            SmoothingState s(a);
            FAIL("expected BadAlpha");
        } catch (const lar::Error& e) {
            CHECK(e.code() == lar::ErrorCode::BadAlpha);
        }
    }
}

TEST_CASE("constant stream converges monotonically") {
    SmoothingState s(0.2);
    s.update(0.0);
    double previous = 0.0;
    double out = 0.0;
    for (int k = 0; k < 120; ++k) {
        out = s.update(3.0);
        CHECK(out >= previous);
        previous = out;
    }
    CHECK(std::abs(out - 3.0) < 1e-9);
}

TEST_CASE("step response follows the closed form") {
    for (double alpha : {0.1, 0.3, 0.5}) {
        SmoothingState s(alpha);
        const double initial = -2.0;
        const double target = 5.0;
        s.update(initial);
        for (int k = 1; k <= 60; ++k) {
            const double err = s.update(target) - target;
            CHECK(std::abs(err - std::pow(1.0 - alpha, k) * (initial - target)) < 1e-12);
        }
    }
}

TEST_CASE("output is a convex combination and constants are fixed points") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    SmoothingState s(0.35);
    s.update(u(rng));
    for (int k = 0; k < 1000; ++k) {
        const double carry = s.carry();
        const double x = u(rng);
        const double out = s.update(x);
        CHECK(out >= std::min(x, carry) - 1e-12);
        CHECK(out <= std::max(x, carry) + 1e-12);
    }

    SmoothingState c(0.3);
    for (int k = 0; k < 50; ++k) CHECK(c.update(4.0) == 4.0);
}

TEST_CASE("reset reseeds from the next sample") {
    SmoothingState s(0.3);
    s.update(1.0);
    s.update(5.0);
    s.reset();
    CHECK_FALSE(s.initialized());
    CHECK(s.update(9.0) == 9.0);
}
