#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lar/error.hpp"
#include "lar/losses.hpp"
#include "test_support.hpp"

using namespace lar;
using lar::testing::random_smart_batch;
namespace oracle = lar::testing::oracle;

namespace {

EmbeddingBatch make_batch(std::initializer_list<std::initializer_list<double>> rows,
                          std::vector<int> labels, int num_labels) {
    EmbeddingBatch b;
    b.num_labels = num_labels;
    b.labels = std::move(labels);
    b.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) b.vectors(i, j++) = v;
        ++i;
    }
    return b;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected lar::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("normalize") {
    Matrix m(1, 2);
    m << 3, 4;
    const Matrix n = normalize(m);
    CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(n(0, 1) == doctest::Approx(0.8).epsilon(1e-15));

    Matrix unit(2, 2);
    unit << 1, 0, 0, -1;
    CHECK(normalize(unit) == unit);

    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    try {
        normalize(zero);
        FAIL("expected ZeroVector");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroVector);
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
}

TEST_CASE("label_distance examples and exhaustive properties") {
    CHECK(label_distance(0, 5, 6) == 1);
    CHECK(label_distance(1, 4, 6) == 3);
    CHECK(label_distance(0, 2, 6) == 2);
    CHECK(code_of([] { label_distance(2, 2, 6); }) == ErrorCode::EqualLabels);

    for (int L = 2; L <= 64; ++L) {
        for (int a = 0; a < L; ++a) {
            for (int b = 0; b < L; ++b) {
                if (a == b) continue;
                const int d = label_distance(a, b, L);
                REQUIRE(d == label_distance(b, a, L));
                REQUIRE(d >= 1);
                REQUIRE(d <= L / 2);
            }
        }
    }
}

TEST_CASE("triplet closed forms") {
    auto collapsed = make_batch({{1, 0}, {1, 0}, {1, 0}, {1, 0}}, {0, 0, 1, 1}, 2);
    CHECK(triplet_loss(collapsed, TripletMargin{1.0}).value == doctest::Approx(1.0));

    auto separated = make_batch({{1, 0}, {1, 0}, {-1, 0}, {-1, 0}}, {0, 0, 1, 1}, 2);
    const LossOutput out = triplet_loss(separated, TripletMargin{1.0});
    CHECK(out.value == 0.0);
    CHECK(out.grads.isZero(0.0));

    CHECK_THROWS_AS(TripletMargin{0.0}, Error);
}

TEST_CASE("smart batch structure is enforced") {
    auto one_label = make_batch({{1, 0}, {0, 1}}, {0, 0}, 6);
    CHECK(code_of([&] { triplet_loss(one_label); }) == ErrorCode::DegenerateBatch);
    auto lonely = make_batch({{1, 0}, {0, 1}, {1, 1}}, {0, 0, 1}, 6);
    CHECK(code_of([&] { mc_n_pair_loss(lonely); }) == ErrorCode::DegenerateBatch);
    CHECK(code_of([&] { lar_loss(lonely); }) == ErrorCode::DegenerateBatch);
    auto bad_label = make_batch({{1, 0}, {0, 1}}, {0, 7}, 6);
    CHECK(code_of([&] { lar_loss(bad_label); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("mc-n-pair closed forms") {
    auto same = random_smart_batch(3, 6, 4);
    for (Eigen::Index i = 0; i < same.size(); ++i) same.vectors.row(i) = same.vectors.row(0);
    // 5 negative labels, each contributing exp(0).
    CHECK(mc_n_pair_loss(same).value == doctest::Approx(std::log(6.0)).epsilon(1e-14));

    // Anchors and positives at (1,0), negatives at (-1,0): every exponent is -2.
    auto split = make_batch({{1, 0}, {1, 0}, {-1, 0}, {-1, 0}, {-1, 0}, {-1, 0}}, {0, 0, 1, 1, 2, 2}, 3);
    const double anchor0 = std::log(1.0 + 2.0 * std::exp(-2.0));
    // Anchors of labels 1 and 2 see each other at +1 and label 0 at -1.
    const double anchor12 = std::log(1.0 + 0.5 * (std::exp(-2.0) * 2.0) + std::exp(0.0));
    CHECK(mc_n_pair_loss(split).value == doctest::Approx((2 * anchor0 + 4 * anchor12) / 6).epsilon(1e-14));
}

TEST_CASE("constellation") {
    auto same = random_smart_batch(5, 6, 3);
    for (Eigen::Index i = 0; i < same.size(); ++i) same.vectors.row(i) = same.vectors.row(0);
    CHECK(constellation_loss(same, 3).value == doctest::Approx(std::log(4.0)).epsilon(1e-14));

    auto batch = random_smart_batch(11, 6, 4);
    CHECK(code_of([&] { constellation_loss(batch, 6); }) == ErrorCode::BadK);
    CHECK(code_of([&] { constellation_loss(batch, 0); }) == ErrorCode::BadK);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto b = random_smart_batch(seed, 6, 4);
        CHECK(std::abs(constellation_loss(b, 5).value - mc_n_pair_loss(b).value) < 1e-10);
    }
}

TEST_CASE("lar closed forms") {
    // Neighbouring labels get multiplier log(1) = 0, so the negative's angle is irrelevant.
    auto a = make_batch({{1, 0}, {1, 0}, {0, 1}, {0, 1}}, {0, 0, 1, 1}, 6);
    auto b = make_batch({{1, 0}, {1, 0}, {-1, 0}, {-1, 0}}, {0, 0, 1, 1}, 6);
    CHECK(lar_loss(a).value == doctest::Approx(lar_loss(b).value).epsilon(1e-15));
    CHECK(lar_loss(a).value == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-15));

    auto same = random_smart_batch(9, 6, 4);
    for (Eigen::Index i = 0; i < same.size(); ++i) same.vectors.row(i) = same.vectors.row(0);
    double expected = 0.0;
    for (int anchor = 0; anchor < 6; ++anchor) {
        double inner = 1.0;
        for (int n = 0; n < 6; ++n) {
            if (n != anchor) inner += std::exp(std::log(double(label_distance(anchor, n, 6))) - 1.0);
        }
        expected += std::log(inner);
    }
    CHECK(lar_loss(same).value == doctest::Approx(expected / 6).epsilon(1e-14));
}

TEST_CASE("lar with two labels reduces to the positive-only closed form") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto b = random_smart_batch(seed, 2, 5);
        const Matrix u = normalize(b.vectors);
        const PairLayout layout = pair_layout(b);
        double expected = 0.0;
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            expected += std::log(1.0 + std::exp(-u.row(i).dot(u.row(layout.partner[i]))));
        }
        expected /= static_cast<double>(b.size());
        CHECK(std::abs(lar_loss(b).value - expected) < 1e-10);
    }
}

TEST_CASE("vectorized losses agree with brute-force oracles") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        auto b = random_smart_batch(seed, 6, 8);
        CHECK(std::abs(triplet_loss(b, TripletMargin{0.5}).value - oracle::triplet(b, 0.5)) < 1e-10);
        CHECK(std::abs(mc_n_pair_loss(b).value - oracle::mc_n_pair(b)) < 1e-10);
        CHECK(std::abs(constellation_loss(b, 2).value - oracle::constellation(b, 2)) < 1e-10);
        auto b4 = random_smart_batch(seed, 6, 4);
        CHECK(std::abs(lar_loss(b4).value - oracle::lar(b4)) < 1e-10);
    }
}

TEST_CASE("analytic gradients match central differences") {
    const std::vector<DmlLossConfig> configs = {
        {LossKind::Triplet, 0.5, 3, 0.0},
        {LossKind::McNPair, 1.0, 3, 0.0},
        {LossKind::Constellation, 1.0, 3, 0.0},
        {LossKind::LAR, 1.0, 3, 0.0},
    };
    for (const auto& cfg : configs) {
        CAPTURE(to_string(cfg.kind));
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto b = random_smart_batch(1000 + seed, 6, 8);
            const Matrix analytic = dml_loss(b, cfg).grads;
            const Matrix numeric =
                finite_diff_gradient([&](const EmbeddingBatch& x) { return dml_loss(x, cfg).value; }, b, 1e-5);
            CHECK(lar::testing::max_relative_error(analytic, numeric) < 1e-4);
        }
    }
}

TEST_CASE("finite differences of trivial losses") {
    auto b = random_smart_batch(1, 3, 4);
    const Matrix g = finite_diff_gradient([](const EmbeddingBatch&) { return 2.5; }, b, 1e-5);
    CHECK(g.isZero(0.0));

    auto separated = make_batch({{1, 0}, {0.9, 0.1}, {-1, 0}, {-1, 0.2}}, {0, 0, 1, 1}, 2);
    const Matrix numeric =
        finite_diff_gradient([](const EmbeddingBatch& x) { return triplet_loss(x).value; }, separated, 1e-5);
    CHECK(triplet_loss(separated).grads.isZero(0.0));
    CHECK(numeric.isZero(0.0));
    CHECK_THROWS_AS(finite_diff_gradient([](const EmbeddingBatch&) { return 0.0; }, b, 1e-2), Error);
}

TEST_CASE("losses are invariant under rotation and permutation") {
    const std::vector<DmlLossConfig> configs = {
        {LossKind::Triplet, 1.0, 3, 0.0},
        {LossKind::McNPair, 1.0, 3, 0.0},
        {LossKind::Constellation, 1.0, 3, 0.0},
        {LossKind::LAR, 1.0, 3, 0.0},
    };
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto b = random_smart_batch(seed, 6, 5);
        const Matrix rotation = lar::testing::random_rotation(seed + 77, 5);
        auto rotated = b;
        rotated.vectors = b.vectors * rotation;

        std::vector<int> perm(static_cast<std::size_t>(b.size()));
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(seed);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto permuted = b;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            permuted.vectors.row(static_cast<Eigen::Index>(i)) = b.vectors.row(perm[i]);
            permuted.labels[i] = b.labels[static_cast<std::size_t>(perm[i])];
        }

        for (const auto& cfg : configs) {
            CAPTURE(to_string(cfg.kind));
            const double base = dml_loss(b, cfg).value;
            CHECK(base >= 0.0);
            CHECK(std::abs(dml_loss(rotated, cfg).value - base) < 1e-8);
            CHECK(std::abs(dml_loss(permuted, cfg).value - base) < 1e-12);
        }
    }
}

TEST_CASE("multiplier offset changes neighbour weighting only when enabled") {
    auto b = random_smart_batch(21, 6, 4);
    CHECK(lar_loss(b, 0.0).value == lar_loss(b).value);
    CHECK(lar_loss(b, 1.0).value != lar_loss(b).value);
    CHECK_THROWS_AS(lar_loss(b, -1.0), Error);
}
