#include "support.hpp"

#include "pframe/errors.hpp"
#include "pframe/frames.hpp"

#include <doctest.h>

#include <cmath>

using namespace pframe;

namespace {

const FiniteFrame kThree(2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});

} // namespace

TEST_CASE("FiniteFrame validation")
{
    CHECK_THROWS_AS(FiniteFrame(0, {{}}), InvalidInput);
    CHECK_THROWS_AS(FiniteFrame(2, {}), InvalidInput);
    CHECK_THROWS_AS(FiniteFrame(2, {{1.0}}), InvalidInput);
    CHECK_THROWS_AS(FiniteFrame(2, {{1.0, INFINITY}}), InvalidInput);
    CHECK_THROWS_AS(FiniteFrame(1, {{1.0}}, {-0.5}), InvalidInput);
    CHECK_THROWS_AS(FiniteFrame(1, {{1.0}}, {1.0, 1.0}), InvalidInput);
}

TEST_CASE("frame_operator")
{
    CHECK(frame_operator(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}})).matrix() == Matrix::identity(2));
    CHECK(frame_operator(kThree).matrix() == Matrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}));
    CHECK(frame_operator(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5})).matrix() ==
          Matrix::diagonal(Vector{0.5, 0.5}));
}

TEST_CASE("frame_bounds")
{
    auto b = frame_bounds(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}));
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(1.0));
    b = frame_bounds(kThree);
    CHECK(std::abs(b.lower - 1.0) < 1e-14);
    CHECK(std::abs(b.upper - 3.0) < 1e-14);
    b = frame_bounds(testing::mercedes_benz());
    CHECK(std::abs(b.lower - 1.5) < 1e-14);
    CHECK(std::abs(b.upper - 1.5) < 1e-14);
    // rank deficiency is reported, not thrown
    b = frame_bounds(FiniteFrame(2, {{1.0, 0.0}, {2.0, 0.0}}));
    CHECK(std::abs(b.lower) < 1e-15);
}

TEST_CASE("frame_distance pairs by index")
{
    CHECK(frame_distance(kThree, kThree) == 0.0);
    CHECK(frame_distance(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}), FiniteFrame(2, {{1.0, 0.0}, {0.0, 0.0}})) == 1.0);
    CHECK(frame_distance(FiniteFrame(2, {{1.0, 0.0}}), FiniteFrame(2, {{0.0, 1.0}})) ==
          doctest::Approx(std::sqrt(2.0)));
    // swapping two vectors changes the distance even though the set is the same
    CHECK(frame_distance(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}), FiniteFrame(2, {{0.0, 1.0}, {1.0, 0.0}})) ==
          doctest::Approx(2.0));
    // weights are absorbed as sqrt(w) phi
    CHECK(frame_distance(FiniteFrame(1, {{2.0}}, {0.25}), FiniteFrame(1, {{1.0}})) == doctest::Approx(0.0));
    CHECK_THROWS_AS(frame_distance(kThree, FiniteFrame(2, {{1.0, 0.0}})), InvalidInput);
    CHECK_THROWS_AS(frame_distance(kThree, FiniteFrame(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})), InvalidInput);
}

TEST_CASE("frame_distance equals the row form in a common basis")
{
    Rng rng(21);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 1 + rng.integer(0, 3);
        const std::size_t n = d + rng.integer(0, 4);
        const auto f = testing::random_frame(d, n, rng, true);
        const auto g = testing::random_frame(d, n, rng, true);
        const auto view = rows_in_eigenbasis(f);
        const auto other = rows_in_basis(g, view.basis);
        double rows = 0.0;
        for (std::size_t k = 0; k < d; ++k)
            rows += squared_distance(view.rows[k], other[k]);
        REQUIRE(std::abs(std::sqrt(rows) - frame_distance(f, g)) <= 1e-10);
    }
}

TEST_CASE("canonical_parseval")
{
    SUBCASE("tight frame is rescaled")
    {
        const auto f = scaled(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}), std::sqrt(2.0));
        const auto g = canonical_parseval(f);
        CHECK(std::abs(g.vector(0)[0] - 1.0) < 1e-14);
        CHECK(std::abs(g.vector(1)[1] - 1.0) < 1e-14);
    }
    SUBCASE("Mercedes-Benz")
    {
        const auto mb = testing::mercedes_benz();
        const auto g = canonical_parseval(mb);
        const double c = std::sqrt(2.0 / 3.0);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t k = 0; k < 2; ++k)
                CHECK(std::abs(g.vector(i)[k] - c * mb.vector(i)[k]) < 1e-14);
        CHECK(is_parseval(g, 1e-12));
    }
    SUBCASE("three vectors")
    {
        const auto g = canonical_parseval(kThree);
        CHECK(max_abs_diff(frame_operator(g).matrix(), Matrix::identity(2)) < 1e-9);
        const double r = 1.0 / std::sqrt(3.0);
        // first column of the closed-form S^{-1/2}
        CHECK(std::abs(g.vector(0)[0] - 0.5 * (r + 1.0)) < 1e-14);
        CHECK(std::abs(g.vector(0)[1] - 0.5 * (r - 1.0)) < 1e-14);
    }
    SUBCASE("weights are kept")
    {
        const FiniteFrame f(2, {{1.0, 0.0}, {0.0, 2.0}, {1.0, 1.0}}, {0.2, 0.3, 0.5});
        const auto g = canonical_parseval(f);
        CHECK(g.weights() == f.weights());
        CHECK(is_parseval(g, 1e-12));
    }
    SUBCASE("singular")
    {
        CHECK_THROWS_AS(canonical_parseval(FiniteFrame(2, {{1.0, 0.0}, {2.0, 0.0}})), DomainError);
        CHECK_THROWS_AS(canonical_parseval(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1e-7}})), DomainError);
    }
}

TEST_CASE("closest_parseval_distance")
{
    CHECK(closest_parseval_distance(random_parseval(3, 7, 1)) < 1e-7);
    // lambda = (3, 1): only the first eigenvalue contributes (sqrt 3 - 1)
    CHECK(std::abs(closest_parseval_distance(kThree) - (std::sqrt(3.0) - 1.0)) < 1e-14);
    CHECK(std::abs(frame_distance(kThree, canonical_parseval(kThree)) - (std::sqrt(3.0) - 1.0)) < 1e-14);
    // tight A = B = 2 in R^2: sqrt(2 (sqrt 2 - 1)^2) = 2 - sqrt 2
    const auto tight = scaled(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}), std::sqrt(2.0));
    CHECK(std::abs(closest_parseval_distance(tight) - (2.0 - std::sqrt(2.0))) < 1e-14);
    CHECK(std::abs(frame_distance(tight, canonical_parseval(tight)) - (2.0 - std::sqrt(2.0))) < 1e-14);
    CHECK_THROWS_AS(closest_parseval_distance(FiniteFrame(2, {{1.0, 0.0}})), DomainError);
}

TEST_CASE("closest-Parseval formula matches the paired distance")
{
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng.integer(0, 4);
        const std::size_t n = d + rng.integer(0, 12 - d);
        const auto f = testing::random_frame(d, n, rng, t % 2 == 1);
        REQUIRE(std::abs(frame_distance(f, canonical_parseval(f)) - closest_parseval_distance(f)) <= 1e-9);
    }
}

TEST_CASE("rows_in_eigenbasis")
{
    const auto ob = rows_in_eigenbasis(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}));
    CHECK(std::abs(std::abs(dot(ob.rows[0], ob.rows[0])) - 1.0) < 1e-14);

    const auto view = rows_in_eigenbasis(kThree);
    CHECK(std::abs(norm(view.rows[0]) - std::sqrt(3.0)) < 1e-14);
    CHECK(std::abs(norm(view.rows[1]) - 1.0) < 1e-14);

    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 1 + rng.integer(0, 4);
        const auto f = testing::random_frame(d, d + rng.integer(0, 5), rng, true);
        const auto v = rows_in_eigenbasis(f);
        const auto b = frame_bounds(f);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const double expected = i == j ? v.eigenvalues[i] : 0.0;
                REQUIRE(std::abs(dot(v.rows[i], v.rows[j]) - expected) <= 1e-9 * std::max(1.0, b.upper));
            }
            REQUIRE(norm(v.rows[i]) >= std::sqrt(b.lower) - 1e-9);
            REQUIRE(norm(v.rows[i]) <= std::sqrt(b.upper) + 1e-9);
        }
    }
}

TEST_CASE("split_vector")
{
    SUBCASE("identity split")
    {
        const double one[] = {1.0};
        const auto g = split_vector(kThree, 1, one);
        CHECK(g.vectors() == kThree.vectors());
    }
    SUBCASE("halving a basis vector")
    {
        const double h = 1.0 / std::sqrt(2.0);
        const double a[] = {h, h};
        const auto g = split_vector(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}), 0, a);
        REQUIRE(g.size() == 3);
        CHECK(g.vector(0) == Vector{h, 0.0});
        CHECK(g.vector(1) == Vector{h, 0.0});
        CHECK(g.vector(2) == Vector{0.0, 1.0});
        CHECK(max_abs_diff(frame_operator(g).matrix(), Matrix::identity(2)) < 1e-15);
    }
    SUBCASE("bad coefficients")
    {
        const double a[] = {0.5, 0.5};
        CHECK_THROWS_AS(split_vector(kThree, 0, a), InvalidInput);
        const double one[] = {1.0};
        CHECK_THROWS_AS(split_vector(kThree, 3, one), InvalidInput);
    }
    SUBCASE("random splits keep S and the closest-Parseval sum")
    {
        Rng rng(99);
        for (int t = 0; t < 100; ++t) {
            const std::size_t d = 1 + rng.integer(0, 3);
            const auto f = testing::random_frame(d, d + rng.integer(0, 4), rng, true);
            Vector a(3);
            for (double& x : a)
                x = rng.normal();
            const double n = norm(a);
            for (double& x : a)
                x /= n;
            const auto g = split_vector(f, rng.integer(0, f.size() - 1), a);
            REQUIRE(max_abs_diff(frame_operator(f).matrix(), frame_operator(g).matrix()) <= 1e-12);
            REQUIRE(std::abs(closest_parseval_sum(f) - closest_parseval_sum(g)) <= 1e-10);
        }
    }
}

TEST_CASE("random_parseval")
{
    const auto basis = random_parseval(3, 3, 2);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(dot(basis.vector(i), basis.vector(j)) - (i == j ? 1.0 : 0.0)) < 1e-12);

    const auto f = random_parseval(2, 5, 7);
    CHECK(max_abs_diff(frame_operator(f).matrix(), Matrix::identity(2)) <= 1e-10);
    CHECK(random_parseval(2, 5, 7).vectors() == f.vectors());
    CHECK(random_parseval(2, 5, 8).vectors() != f.vectors());
    CHECK_THROWS_AS(random_parseval(3, 2, 1), InvalidInput);
}

TEST_CASE("is_parseval")
{
    CHECK(is_parseval(FiniteFrame(2, {{1.0, 0.0}, {0.0, 1.0}}), 1e-12));
    CHECK_FALSE(is_parseval(kThree, 1e-6));
    CHECK(is_parseval(scaled(testing::mercedes_benz(), std::sqrt(2.0 / 3.0)), 1e-12));
}

TEST_CASE("canonical map is scale invariant")
{
    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
        const auto f = testing::random_frame(3, 5, rng, true);
        const double c = std::exp(rng.uniform(-2.0, 2.0));
        REQUIRE(frame_distance(canonical_parseval(f), canonical_parseval(scaled(f, c))) <= 1e-10);
    }
}

TEST_CASE("one-dimensional canonical frame")
{
    const FiniteFrame f(1, {{3.0}, {-4.0}});
    const auto g = canonical_parseval(f);
    CHECK(std::abs(g.vector(0)[0] - 0.6) < 1e-15);
    CHECK(std::abs(g.vector(1)[0] + 0.8) < 1e-15);
}
