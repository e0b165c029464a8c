#include "support.hpp"

#include "pframe/empirical.hpp"
#include "pframe/errors.hpp"
#include "pframe/measures.hpp"

#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <numbers>

using namespace pframe;

namespace {

DiscreteMeasure line(std::vector<double> xs, std::vector<double> ws)
{
    std::vector<Vector> atoms;
    for (double x : xs)
        atoms.push_back({x});
    return DiscreteMeasure(1, std::move(atoms), std::move(ws));
}

const DiscreteMeasure kHalfBasis(2, {{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5});

MeasureSpec standard_gaussian(std::size_t d)
{
    return MeasureSpec::gaussian(Vector(d, 0.0), SymMatrix::identity(d));
}

// int_{|x| >= R} |x|^2 dN(0, I_2) in closed form
double gaussian2_tail(double r)
{
    return (r * r + 2.0) * std::exp(-r * r / 2.0);
}

} // namespace

TEST_CASE("DiscreteMeasure validation")
{
    CHECK_THROWS_AS(DiscreteMeasure(1, {{0.0}, {1.0}}, {0.5, 0.6}), InvalidInput);
    CHECK_THROWS_AS(DiscreteMeasure(1, {{0.0}, {1.0}}, {1.5, -0.5}), InvalidInput);
    CHECK_NOTHROW(DiscreteMeasure::normalized(1, {{0.0}, {1.0}}, {0.5, 0.5 + 5e-10}));
    CHECK_THROWS_AS(DiscreteMeasure::normalized(1, {{0.0}, {1.0}}, {0.5, 0.5 + 5e-9}), InvalidInput);
    const auto m = DiscreteMeasure::normalized(1, {{0.0}, {1.0}}, {0.5, 0.5 + 5e-10});
    CHECK(std::abs(m.weight(0) + m.weight(1) - 1.0) <= 1e-15);
}

TEST_CASE("second_moment_matrix closed forms")
{
    const auto dirac = second_moment_matrix(MeasureSpec::discrete(DiscreteMeasure::dirac({2.0, -1.0})), 0, 0);
    CHECK(dirac.exact);
    CHECK(dirac.value.matrix() == Matrix::from_rows({{4.0, -2.0}, {-2.0, 1.0}}));

    const auto sphere = second_moment_matrix(MeasureSpec::uniform_sphere(2, 1.0), 0, 0);
    CHECK(max_abs_diff(sphere.value.matrix(), 0.5 * Matrix::identity(2)) == 0.0);

    const auto half = second_moment_matrix(MeasureSpec::discrete(kHalfBasis), 0, 0);
    CHECK(half.value.matrix() == Matrix::diagonal(Vector{0.5, 0.5}));

    const auto ball = second_moment_matrix(MeasureSpec::uniform_ball(3, 2.0), 0, 0);
    CHECK(std::abs(ball.value(0, 0) - 4.0 / 5.0) < 1e-15);

    const auto g = MeasureSpec::gaussian({1.0, 2.0}, SymMatrix(Matrix::from_rows({{2.0, 0.5}, {0.5, 1.0}})));
    CHECK(g.analytic_second_moment()->matrix() == Matrix::from_rows({{3.0, 2.5}, {2.5, 5.0}}));
}

TEST_CASE("Monte Carlo second moments agree with the closed forms")
{
    const std::vector<MeasureSpec> specs = {
        MeasureSpec::uniform_sphere(2, 1.0),
        MeasureSpec::uniform_ball(3, 1.5),
        MeasureSpec::gaussian({0.5, -1.0}, SymMatrix(Matrix::from_rows({{1.0, 0.3}, {0.3, 0.5}}))),
        MeasureSpec::mixture({{0.3, MeasureSpec::discrete(kHalfBasis)}, {0.7, MeasureSpec::uniform_sphere(2, 2.0)}}),
    };
    for (const auto& spec : specs) {
        const auto exact = *spec.analytic_second_moment();
        const auto wrapped = MeasureSpec::sampler(spec.dim(), [spec](Rng& r, std::span<double> x) { spec.draw(r, x); });
        const auto mc = second_moment_matrix(wrapped, 200000, 42);
        CHECK_FALSE(mc.exact);
        for (std::size_t a = 0; a < spec.dim(); ++a)
            for (std::size_t b = 0; b < spec.dim(); ++b)
                CHECK(std::abs(mc.value(a, b) - exact(a, b)) <= 5.0 * mc.standard_error(a, b) + 1e-12);
    }
    const auto none = MeasureSpec::sampler(1, [](Rng&, std::span<double> x) { x[0] = 1.0; });
    CHECK_THROWS_AS(second_moment_matrix(none, 0, 1), InvalidInput);
}

TEST_CASE("probabilistic_frame_bounds")
{
    auto b = probabilistic_frame_bounds(MeasureSpec::uniform_sphere(2, 1.0), 0, 0);
    CHECK(b.lower == doctest::Approx(0.5));
    CHECK(b.upper == doctest::Approx(0.5));
    b = probabilistic_frame_bounds(kHalfBasis);
    CHECK(b.lower == doctest::Approx(0.5));
    b = probabilistic_frame_bounds(DiscreteMeasure(2, {{1.0, 0.0}, {2.0, 0.0}}, {0.5, 0.5}));
    CHECK(std::abs(b.lower) < 1e-15);
    CHECK(b.upper == doctest::Approx(2.5));
}

TEST_CASE("push_forward_canonical")
{
    // tight with S = I/2: atoms scale by sqrt 2
    const auto cross = DiscreteMeasure::uniform(2, {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}});
    CHECK(std::abs(push_forward_canonical(cross).atom(0)[0] - std::sqrt(2.0)) < 1e-14);

    const auto parseval = DiscreteMeasure(2, {{std::sqrt(2.0), 0.0}, {0.0, std::sqrt(2.0)}}, {0.5, 0.5});
    const auto unchanged = push_forward_canonical(parseval);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(squared_distance(unchanged.atom(i), parseval.atom(i)) < 1e-28);

    const auto three = DiscreteMeasure::uniform(2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
    CHECK(op_norm_diff(second_moment(push_forward_canonical(three)), SymMatrix::identity(2)) <= 1e-9);

    CHECK_THROWS_AS(push_forward_canonical(DiscreteMeasure(2, {{1.0, 0.0}, {2.0, 0.0}}, {0.5, 0.5})), DomainError);

    Rng rng(6);
    for (int t = 0; t < 100; ++t) {
        const auto f = testing::random_frame(1 + rng.integer(0, 3), 4 + rng.integer(0, 4), rng, true);
        Vector w = f.weights();
        double s = 0.0;
        for (double x : w)
            s += x;
        for (double& x : w)
            x /= s;
        const DiscreteMeasure m = DiscreteMeasure::normalized(f.dim(), f.vectors(), w);
        REQUIRE(op_norm_diff(second_moment(push_forward_canonical(m)), SymMatrix::identity(m.dim())) <= 1e-9);
    }
}

TEST_CASE("sampling is seeded, sharded and thread independent")
{
    const auto g = standard_gaussian(3);
    const auto a = sample_points(g, 1000, 9);
    CHECK(sample_points(g, 1000, 9) == a);
    CHECK(sample_points(g, 1000, 10) != a);
    // a longer run extends a shorter one
    const auto longer = sample_points(g, 1500, 9);
    CHECK(std::equal(a.begin(), a.end(), longer.begin()));
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(3);
    const auto threaded = sample_points(g, 1000, 9);
    omp_set_num_threads(1);
    const auto serial = sample_points(g, 1000, 9);
    omp_set_num_threads(saved);
    CHECK(threaded == a);
    CHECK(serial == a);
#endif
}

TEST_CASE("moment matching makes the sample second moment exact")
{
    const auto g = MeasureSpec::gaussian({1.0, 0.0}, SymMatrix(Matrix::from_rows({{0.5, 0.2}, {0.2, 1.0}})));
    const auto m = sample_measure(g, 500, 3, true);
    CHECK(max_abs_diff(second_moment(m).matrix(), g.analytic_second_moment()->matrix()) <= 1e-12);
    const auto raw = sample_measure(g, 500, 3, false);
    CHECK(max_abs_diff(second_moment(raw).matrix(), g.analytic_second_moment()->matrix()) > 1e-6);
}

TEST_CASE("truncate discrete measures exactly")
{
    SUBCASE("already inside")
    {
        const auto m = DiscreteMeasure::uniform(2, {{0.5, 0.0}, {0.0, -1.0}});
        const auto r = truncate(m, 0.1);
        CHECK(r.measure->atoms() == m.atoms());
        CHECK(r.measure->weights() == m.weights());
        CHECK(r.w2_squared_bound == 0.0);
        CHECK(r.radius > 1.0);
    }
    SUBCASE("far atom moves to the origin")
    {
        const auto m = line({1.0, 5.0}, {0.9, 0.1});
        const auto r = truncate(m, 3.0);
        CHECK(r.radius > 1.0);
        CHECK(r.radius <= 5.0);
        REQUIRE(r.measure->size() == 2);
        CHECK(r.measure->atom(0) == Vector{1.0});
        CHECK(r.measure->atom(1) == Vector{0.0});
        CHECK(r.measure->weight(1) == doctest::Approx(0.1));
        CHECK(std::abs(r.w2_squared_bound - 2.5) < 1e-14);
        CHECK(r.bounds_before.lower == doctest::Approx(3.4));
        CHECK(r.bounds_after.lower == doctest::Approx(0.9));
        CHECK(r.bounds_after.lower >= r.bounds_before.lower - 3.0);
        // optimal transport does better than the certificate coupling: 0.1*16 + 0.1*1
        CHECK(std::abs(w2_discrete(m, *r.measure).cost_squared - 1.7) < 1e-12);
        CHECK(validate_coupling(*r.coupling, m, *r.measure).pass);
    }
    SUBCASE("excluded mass merges into an atom at the origin")
    {
        const auto m = line({0.0, 1.0, 10.0}, {0.2, 0.7, 0.1});
        const auto r = truncate(m, 10.5);
        CHECK(r.measure->size() == 2);
        CHECK(r.measure->weight(0) == doctest::Approx(0.3));
    }
    SUBCASE("bad eps")
    {
        CHECK_THROWS_AS(truncate(kHalfBasis, 0.0), InvalidInput);
        CHECK_THROWS_AS(truncate(kHalfBasis, -1.0), InvalidInput);
    }
}

TEST_CASE("truncation certificate holds on random measures with outliers")
{
    Rng rng(31);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 1 + rng.integer(0, 2);
        const std::size_t n = 5 + rng.integer(0, 20);
        std::vector<Vector> atoms(n, Vector(d));
        Vector w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double scale = rng.uniform() < 0.2 ? 20.0 : 1.0;
            for (double& x : atoms[i])
                x = scale * rng.normal();
            w[i] = rng.uniform(0.1, 1.0);
        }
        double s = 0.0;
        for (double x : w)
            s += x;
        for (double& x : w)
            x /= s;
        const auto m = DiscreteMeasure::normalized(d, atoms, w);
        const double eps = rng.uniform(0.05, 5.0);
        const auto r = truncate(m, eps);
        const double exact = w2_discrete(m, *r.measure).cost_squared;
        REQUIRE(exact <= r.w2_squared_bound + 1e-10);
        REQUIRE(r.w2_squared_bound < eps);
        REQUIRE(r.bounds_after.lower >= r.bounds_before.lower - eps);
        REQUIRE(r.bounds_after.upper <= r.bounds_before.upper + 1e-12);
    }
}

TEST_CASE("truncate a gaussian by Monte Carlo bisection")
{
    const auto r = truncate(standard_gaussian(2), 0.05, {100000, 17});
    CHECK_FALSE(r.exact);
    CHECK(r.tail_upper < 0.05);
    CHECK(r.w2_squared_bound < 0.05);
    // closed-form oracle at the chosen radius
    const double truth = gaussian2_tail(r.radius);
    CHECK(truth < 0.05);
    CHECK(std::abs(r.tail - truth) <= 4.0 * (r.tail_upper - r.tail) / 2.5758);

    // independent 10^6-sample check at the same radius
    const auto pts = sample_points(standard_gaussian(2), 1000000, 1234);
    double tail = 0.0;
    for (std::size_t i = 0; i < 1000000; ++i) {
        const double q = pts[2 * i] * pts[2 * i] + pts[2 * i + 1] * pts[2 * i + 1];
        if (q >= r.radius * r.radius)
            tail += q;
    }
    tail /= 1e6;
    CHECK(std::abs(tail - truth) < 0.003);

    // the truncated sampler never leaves the ball
    Rng rng(1);
    Vector x(2);
    for (int k = 0; k < 10000; ++k) {
        r.spec->draw(rng, x);
        REQUIRE(norm(x) < r.radius);
    }
}

TEST_CASE("truncation refuses a noisy tail")
{
    // Pareto-like radial tail with infinite variance of |x|^2
    const auto heavy = MeasureSpec::sampler(1, [](Rng& rng, std::span<double> x) {
        x[0] = std::pow(rng.uniform(), -1.0 / 2.2);
    });
    CHECK_THROWS_AS(truncate(heavy, 0.01, {2000, 3}), StageFailure);
}

TEST_CASE("quantize")
{
    SUBCASE("atoms on anchors stay put")
    {
        const auto m = DiscreteMeasure::uniform(2, {{0.0, 0.0}, {0.5, -0.5}, {-1.0, 0.5}});
        const auto q = quantize(m, {2, 0.5, 1, 2.0});
        CHECK(q.coupling_cost == 0.0);
        CHECK(w2_discrete(m, q.measure).cost == 0.0);
        CHECK(q.operator_deviation == 0.0);
    }
    SUBCASE("hand example")
    {
        const auto m = DiscreteMeasure::uniform(2, {{0.1, 0.0}, {0.3, 0.0}});
        const auto q = quantize(m, {2, 0.5, 1, 1.0});
        REQUIRE(q.measure.size() == 1);
        CHECK(q.measure.atom(0) == Vector{0.0, 0.0});
        const double expected = std::sqrt(0.5 * 0.01 + 0.5 * 0.09);
        CHECK(std::abs(q.coupling_cost - expected) < 1e-15);
        CHECK(std::abs(w2_discrete(m, q.measure).cost - expected) < 1e-15);
        CHECK(std::abs(q.w2_bound - 0.5 * std::sqrt(2.0)) < 1e-15);
        CHECK(q.coupling_cost <= q.w2_bound);
    }
    SUBCASE("refinement halves the diameter exactly")
    {
        QuantizationGrid g{3, 0.7, 1, 2.0};
        for (int n = 0; n < 6; ++n) {
            CHECK(g.refined().diameter() == g.diameter() / 2.0);
            g = g.refined();
        }
        QuantizationGrid c = g;
        c.centered = true;
        CHECK(c.diameter() == g.diameter() / 2.0);
    }
    SUBCASE("closing faces belong to the next cube")
    {
        const auto m = line({0.5, 0.25}, {0.5, 0.5});
        const auto q = quantize(m, {1, 0.5, 1, 1.0});
        REQUIRE(q.measure.size() == 2);
        CHECK(q.measure.atom(0) == Vector{0.0});
        CHECK(q.measure.atom(1) == Vector{0.5});
    }
    SUBCASE("outside the ball")
    {
        CHECK_THROWS_AS(quantize(line({1.0}, {1.0}), {1, 0.5, 1, 1.0}), DomainError);
        CHECK_NOTHROW(quantize(line({0.0}, {1.0}), {1, 0.5, 1, 1.0}));
    }
}

TEST_CASE("quantization certificates on random measures")
{
    Rng rng(71);
    for (int t = 0; t < 30; ++t) {
        const std::size_t d = 1 + rng.integer(0, 2);
        std::vector<Vector> atoms(30, Vector(d));
        for (auto& a : atoms)
            for (double& x : a)
                x = rng.uniform(-1.0, 1.0);
        const auto m = DiscreteMeasure::uniform(d, atoms);
        QuantizationGrid g{d, 2.0, 1, 2.0, t % 3 == 0};
        for (int n = 0; n < 5; ++n, g = g.refined()) {
            const auto q = quantize(m, g);
            double mass = 0.0;
            for (double w : q.measure.weights())
                mass += w;
            REQUIRE(std::abs(mass - 1.0) <= 1e-12);
            REQUIRE(validate_coupling(q.coupling, m, q.measure).pass);
            const double exact = w2_discrete(m, q.measure).cost;
            REQUIRE(exact <= q.coupling_cost + 1e-12);
            REQUIRE(q.coupling_cost <= q.w2_bound);
            REQUIRE(q.operator_deviation <= q.operator_bound);
        }
    }
}

TEST_CASE("circle partition")
{
    const double rho = 1.3;
    for (double cell : {2.0, 0.7, 0.05}) {
        const auto p = circle_partition(rho, cell);
        double mass = 0.0;
        for (double w : p.measure.weights())
            mass += w;
        CHECK(std::abs(mass - 1.0) < 1e-14);
        // both ends of every arc (pulled slightly inward) share the midpoint's cube
        for (std::size_t i = 0; i < p.begin.size(); ++i) {
            const double len = p.end[i] - p.begin[i];
            if (len < 1e-9)
                continue;
            for (double t : {p.begin[i] + 1e-6 * len, p.end[i] - 1e-6 * len}) {
                CHECK(std::floor(rho * std::cos(t) / cell) == std::floor(p.measure.atom(i)[0] / cell));
                CHECK(std::floor(rho * std::sin(t) / cell) == std::floor(p.measure.atom(i)[1] / cell));
            }
        }
    }

    // one cube per quadrant
    const auto coarse = quantize(circle_partition(1.0, 1.5).measure, {2, 1.5, 1, 1.5, false});
    REQUIRE(coarse.measure.size() == 4);
    for (double w : coarse.measure.weights())
        CHECK(w == doctest::Approx(0.25).epsilon(1e-14));

    // exact cube masses and cost against a dense equispaced quadrature
    const double h = 0.3;
    const auto p = circle_partition(1.0, h);
    const auto q = quantize(p.measure, {2, 1.2, 3, 1.2, false});
    REQUIRE(q.measure.size() > 4);
    std::vector<Vector> anchors;
    for (const auto& e : q.coupling.entries)
        anchors.push_back(q.measure.atom(e.j));
    const std::size_t k = 2000000;
    Matrix s(2, 2);
    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double t = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(k);
        const double x = std::cos(t), y = std::sin(t);
        const double cx = std::floor(x / h) * h, cy = std::floor(y / h) * h;
        s(0, 0) += cx * cx;
        s(0, 1) += cx * cy;
        s(1, 1) += cy * cy;
        cost += (x - cx) * (x - cx) + (y - cy) * (y - cy);
    }
    const double kk = static_cast<double>(k);
    const Matrix exact = second_moment(q.measure).matrix();
    CHECK(std::abs(exact(0, 0) - s(0, 0) / kk) < 1e-6);
    CHECK(std::abs(exact(0, 1) - s(0, 1) / kk) < 1e-6);
    CHECK(std::abs(exact(1, 1) - s(1, 1) / kk) < 1e-6);
    CHECK(std::abs(arc_cost_squared(p, anchors) - cost / kk) < 1e-6);
}

TEST_CASE("discretize")
{
    SUBCASE("finite input")
    {
        const auto m = DiscreteMeasure::uniform(2, {{1.0, 0.0}, {0.0, 1.0}, {-0.5, -0.5}});
        const auto r = discretize(MeasureSpec::discrete(m), 0.5, {});
        CHECK_FALSE(r.sampled);
        CHECK(r.w2_ok());
        CHECK(r.lower_ok());
        CHECK(r.upper_ok());
        CHECK(r.grid.diameter() < 0.25);
        CHECK(w2_discrete(m, r.measure).cost <= r.w2_bound + 1e-12);
    }
    SUBCASE("uniform sphere")
    {
        const auto r = discretize(MeasureSpec::uniform_sphere(2, 1.0), 0.1, {5000, 1});
        CHECK_FALSE(r.sampled);
        CHECK(r.exact_cells);
        CHECK(r.w2_ok());
        CHECK(r.bounds_out.lower >= 0.4);
        CHECK(r.bounds_out.upper <= 0.6);
        CHECK(r.w2_bound <= r.w2_bound_a_priori);

        const auto s3 = discretize(MeasureSpec::uniform_sphere(3, 1.0), 0.3, {5000, 1});
        CHECK(s3.sampled);
        CHECK(s3.w2_ok());
        CHECK(w2_discrete(s3.reference, s3.measure).cost <= s3.w2_bound + 1e-12);
    }
    SUBCASE("assignment follows the couplings")
    {
        const auto r = discretize(standard_gaussian(2), 0.3, {500, 4});
        Vector mass(r.measure.size(), 0.0);
        for (std::size_t i = 0; i < r.assignment.size(); ++i)
            mass[r.assignment[i]] += r.reference.weight(i);
        for (std::size_t j = 0; j < mass.size(); ++j)
            CHECK(mass[j] == doctest::Approx(r.measure.weight(j)).epsilon(1e-12));
    }
    SUBCASE("gaussian")
    {
        const auto r = discretize(standard_gaussian(2), 0.2, {5000, 2});
        CHECK(r.w2_ok());
        CHECK(r.lower_ok());
        CHECK(r.upper_ok());
        CHECK(r.w2_bound_a_priori < 0.2);
    }
    SUBCASE("not a frame")
    {
        const auto flat = DiscreteMeasure(2, {{1.0, 0.0}, {2.0, 0.0}}, {0.5, 0.5});
        CHECK_THROWS_AS(discretize(MeasureSpec::discrete(flat), 0.1, {}), DomainError);
    }
}

TEST_CASE("approx_parseval")
{
    SUBCASE("sphere of radius sqrt 2")
    {
        const auto r = approx_parseval(MeasureSpec::uniform_sphere(2, std::sqrt(2.0)), 0.2, {4000, 5});
        CHECK(r.parseval_deviation <= 1e-9);
        CHECK(r.w2_bound < 0.2);
        CHECK(w2_discrete(r.discretization.reference, r.measure).cost <= r.w2_bound + 1e-12);
    }
    SUBCASE("mixture of two orthonormal bases")
    {
        const auto e = DiscreteMeasure(2, {{std::sqrt(2.0), 0.0}, {0.0, std::sqrt(2.0)}}, {0.5, 0.5});
        const auto f = DiscreteMeasure(2, {{1.0, 1.0}, {1.0, -1.0}}, {0.5, 0.5});
        const auto spec = MeasureSpec::mixture({{0.5, MeasureSpec::discrete(e)}, {0.5, MeasureSpec::discrete(f)}});
        const auto r = approx_parseval(spec, 0.3, {2000, 1});
        CHECK(r.parseval_deviation <= 1e-9);
    }
    SUBCASE("finite Parseval input")
    {
        const double r = std::sqrt(2.0);
        const auto m = DiscreteMeasure::uniform(2, {{r, 0.0}, {0.0, r}, {-r, 0.0}, {0.0, -r}});
        const auto out = approx_parseval(MeasureSpec::discrete(m), 0.05, {});
        CHECK(out.parseval_deviation <= 1e-9);
        CHECK(w2_discrete(m, out.measure).cost <= out.w2_bound + 1e-12);
        CHECK(out.w2_bound < 0.05);
    }
    SUBCASE("rejects non-Parseval input")
    {
        CHECK_THROWS_AS(approx_parseval(MeasureSpec::uniform_sphere(2, 1.0), 0.1, {}), DomainError);
    }
}

TEST_CASE("w2_empirical")
{
    const auto m = MeasureSpec::discrete(DiscreteMeasure::uniform(2, {{0.0, 0.0}, {1.0, 2.0}, {3.0, 1.0}}));
    const auto same = w2_empirical(m, m, 3, 4, 1);
    CHECK(same.mean == 0.0);
    CHECK(same.max == 0.0);

    const auto d0 = MeasureSpec::discrete(DiscreteMeasure::dirac({0.0}));
    const auto d1 = MeasureSpec::sampler(1, [](Rng&, std::span<double> x) { x[0] = 1.0; });
    const auto unit = w2_empirical(d0, d1, 5, 6, 2);
    for (double v : unit.values)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

    const auto g = standard_gaussian(2);
    const auto small = w2_empirical(g, g, 32, 16, 3);
    const auto large = w2_empirical(g, g, 256, 16, 3);
    CHECK(large.mean < small.mean);
    CHECK(w2_empirical(g, g, 64, 4, 9).values == w2_empirical(g, g, 64, 4, 9).values);
    CHECK_THROWS_AS(w2_empirical(g, g, 0, 4, 1), InvalidInput);
}
