#include "pframe/verify.hpp"

#include "parallel_for.hpp"
#include "verify_support.hpp"

#include "pframe/errors.hpp"
#include "pframe/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace pframe {

using detail::kInf;

void VerificationReport::add(const TrialRecord& r)
{
    ++trials;
    worst_margin = std::min(worst_margin, r.violation_margin);
    if (r.violation_margin < 0.0)
        ++violations;
    records.push_back(r);
}

void VerificationReport::fail(std::string reason)
{
    ++violations;
    failures.push_back(std::move(reason));
}

void VerificationReport::note_push_forward(double deviation)
{
    ++push_forwards;
    max_parseval_deviation = std::max(max_parseval_deviation, deviation);
}

void write_trials_csv(std::ostream& out, const VerificationReport& r)
{
    out << "trial,eps,delta_observed,A,B,d,N,violation_margin\n";
    char buf[512];
    for (const auto& t : r.records) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%zu,%zu,%.17g\n", t.trial, t.eps, t.delta_observed,
                      t.A, t.B, t.d, t.N, t.violation_margin);
        out << buf;
    }
}

// ------------------------------------------------------------------ corpora

namespace {

struct Shape {
    std::size_t d;
    std::size_t n;
};

Shape random_shape(Rng& rng, std::size_t max_dim, std::size_t max_count)
{
    const std::size_t d = 1 + rng.integer(0, max_dim - 1);
    return {d, rng.integer(d, std::max(d, max_count))};
}

FiniteFrame random_frame(Rng& rng, std::size_t d, std::size_t n, bool weighted)
{
    for (;;) {
        std::vector<Vector> v(n, Vector(d));
        for (auto& x : v)
            for (double& c : x)
                c = rng.normal();
        Vector w(n, 1.0);
        if (weighted)
            for (double& x : w)
                x = rng.uniform(0.2, 2.0);
        FiniteFrame f(d, std::move(v), std::move(w));
        if (detail::relative_spread(frame_bounds(f)) > 1e-3)
            return f;
    }
}

} // namespace

std::vector<FiniteFrame> frame_corpus(std::size_t count, std::uint64_t seed, std::size_t max_dim,
                                      std::size_t max_count)
{
    if (max_dim == 0)
        throw InvalidInput("frame_corpus: max_dim must be positive");
    std::vector<FiniteFrame> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(seed, i);
        const auto s = random_shape(rng, max_dim, max_count);
        out.push_back(random_frame(rng, s.d, s.n, i % 2 == 1));
    }
    return out;
}

std::vector<DiscreteMeasure> measure_corpus(std::size_t count, std::uint64_t seed, std::size_t max_dim,
                                            std::size_t max_atoms)
{
    if (max_dim == 0)
        throw InvalidInput("measure_corpus: max_dim must be positive");
    std::vector<DiscreteMeasure> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(seed, i);
        const auto s = random_shape(rng, max_dim, max_atoms);
        for (;;) {
            std::vector<Vector> atoms(s.n, Vector(s.d));
            for (auto& a : atoms)
                for (double& c : a)
                    c = rng.normal();
            Vector w(s.n);
            for (double& x : w)
                x = rng.uniform(0.05, 1.0);
            double total = 0.0;
            for (double x : w)
                total += x;
            for (double& x : w)
                x /= total;
            auto m = DiscreteMeasure::normalized(s.d, std::move(atoms), std::move(w));
            if (detail::relative_spread(probabilistic_frame_bounds(m)) > 1e-3) {
                out.push_back(std::move(m));
                break;
            }
        }
    }
    return out;
}

namespace {

Vector window_spectrum(std::size_t d, double lower, double upper, Rng& rng)
{
    Vector lambda(d);
    for (double& x : lambda)
        x = rng.uniform(lower, upper);
    if (d >= 2) {
        lambda.front() = upper;
        lambda.back() = lower;
    }
    return lambda;
}

/// O diag(sqrt lambda) U with U a random d x n matrix with orthonormal rows.
Matrix window_synthesis(std::size_t d, std::size_t n, double lower, double upper, Rng& rng)
{
    if (!(lower > 0.0) || !(upper >= lower))
        throw InvalidInput("frame window needs 0 < lower <= upper");
    const Matrix u = random_parseval(d, n, rng.next()).weighted_synthesis();
    const Vector lambda = window_spectrum(d, lower, upper, rng);
    Vector root(d);
    for (std::size_t k = 0; k < d; ++k)
        root[k] = std::sqrt(lambda[k]);
    return detail::random_orthogonal(d, rng) * (Matrix::diagonal(root) * u);
}

} // namespace

FiniteFrame frame_in_window(std::size_t d, std::size_t n, double lower, double upper, Rng& rng)
{
    return detail::frame_from_columns(window_synthesis(d, n, lower, upper, rng));
}

DiscreteMeasure measure_in_window(std::size_t d, std::size_t n, double lower, double upper, Rng& rng)
{
    const Matrix phi = window_synthesis(d, n, lower, upper, rng);
    Vector w(n);
    double total = 0.0;
    for (double& x : w)
        total += (x = rng.uniform(0.05, 1.0));
    std::vector<Vector> atoms(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] /= total;
        atoms[i] = phi.column(i);
        for (double& c : atoms[i])
            c /= std::sqrt(w[i]);
    }
    return DiscreteMeasure::normalized(d, std::move(atoms), std::move(w));
}

// -------------------------------------------------------------- optimality

namespace {

// Literal tie probe: a competitor this close to the optimum "should" be this
// close to the canonical image. Quadratic growth makes it fail for flat
// objectives, so it is only counted; the growth inequality is what fails.
constexpr double kTieGap = 1e-9;
constexpr double kTieRadius = 1e-6;

// For Parseval Psi, d(Phi, Psi)^2 - d(Phi, Phi^dag)^2 = tr(S^{1/2} D D^T) with
// D = Phi^dag - Psi, hence >= sqrt(A) d(Psi, Phi^dag)^2; the same argument
// through a coupling gives the W2 version.
double growth_margin(double dist, double best, double sep, double lower, double tol)
{
    const double root = std::sqrt(lower);
    return (dist * dist - best * best) / root + tol * (1.0 + dist * dist + best * best) / root - sep * sep;
}

struct OptimalityStats {
    double identity_gap = 0.0;
    double min_excess = kInf;
    std::size_t near_ties = 0;
    std::size_t tie_counterexamples = 0;
    std::size_t growth_failures = 0;
    std::size_t push_forwards = 0;
    double parseval = 0.0;
};

} // namespace

VerificationReport verify_finite_optimality(const std::vector<FiniteFrame>& frames, const OptimalityOptions& opt,
                                            std::uint64_t seed)
{
    const std::size_t n = frames.size();
    std::vector<TrialRecord> recs(n);
    std::vector<OptimalityStats> stats(n);

    detail::parallel_for(n, [&](std::size_t t) {
        const auto& f = frames[t];
        Rng rng(seed, t);
        auto& st = stats[t];
        const auto dag = canonical_parseval(f);
        const double best = frame_distance(f, dag);
        st.identity_gap = std::abs(best - closest_parseval_distance(f));
        st.parseval = detail::deviation_from_identity(frame_operator(dag));
        st.push_forwards = 1;

        const auto bounds = frame_bounds(f);
        TrialRecord r{t, 0.0, best, bounds.lower, bounds.upper, f.dim(), f.size()};
        auto consider = [&](const FiniteFrame& psi) {
            const double dist = frame_distance(f, psi);
            const double sep = frame_distance(psi, dag);
            const double growth = growth_margin(dist, best, sep, bounds.lower, 1e-12);
            r.violation_margin = std::min({r.violation_margin, dist - best + opt.tol, growth});
            st.min_excess = std::min(st.min_excess, dist - best);
            st.growth_failures += growth < 0.0;
            if (dist <= best + kTieGap) {
                ++st.near_ties;
                st.tie_counterexamples += sep > kTieRadius;
            }
        };

        for (std::size_t c = 0; c < opt.competitors; ++c)
            consider(random_parseval(f.dim(), f.size(), rng.next()));

        const Matrix u = dag.weighted_synthesis();
        for (std::size_t p = 0; p < opt.probes; ++p) {
            Matrix z = detail::gaussian_matrix(u.rows(), u.cols(), rng);
            z = (opt.step / z.frobenius()) * z;
            const auto psi = canonical_parseval(detail::frame_from_columns(u + z));
            st.parseval = std::max(st.parseval, detail::deviation_from_identity(frame_operator(psi)));
            ++st.push_forwards;
            consider(psi);
        }
        recs[t] = r;
    });

    VerificationReport rep;
    rep.suite = "finite-optimality";
    rep.parameters = {{"frames", n},      {"competitors", opt.competitors}, {"probes", opt.probes},
                      {"step", opt.step}, {"tol", opt.tol},                 {"seed", seed}};
    double identity = 0.0;
    double excess = kInf;
    std::size_t ties = 0;
    std::size_t counterexamples = 0;
    std::size_t growth_fail = 0;
    for (std::size_t t = 0; t < n; ++t) {
        rep.add(recs[t]);
        identity = std::max(identity, stats[t].identity_gap);
        excess = std::min(excess, stats[t].min_excess);
        ties += stats[t].near_ties;
        counterexamples += stats[t].tie_counterexamples;
        growth_fail += stats[t].growth_failures;
        rep.push_forwards += stats[t].push_forwards;
        rep.max_parseval_deviation = std::max(rep.max_parseval_deviation, stats[t].parseval);
    }
    rep.summary = {{"max_identity_gap", identity},
                   {"min_excess", n ? excess : 0.0},
                   {"near_ties", ties},
                   {"tie_counterexamples", counterexamples},
                   {"growth_failures", growth_fail}};
    return rep;
}

VerificationReport verify_finite_optimality(std::size_t d, std::size_t n, std::size_t trials,
                                            std::size_t competitors, std::uint64_t seed)
{
    if (d == 0 || n < d)
        throw InvalidInput("verify_finite_optimality: need n >= d >= 1");
    std::vector<FiniteFrame> frames;
    frames.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(splitmix64(seed), t);
        frames.push_back(random_frame(rng, d, n, t % 2 == 1));
    }
    OptimalityOptions opt;
    opt.competitors = competitors;
    auto rep = verify_finite_optimality(frames, opt, seed);
    rep.parameters["d"] = d;
    rep.parameters["N"] = n;
    return rep;
}

namespace {

void normalize(Vector& w)
{
    double total = 0.0;
    for (double x : w)
        total += x;
    for (double& x : w)
        x /= total;
}

DiscreteMeasure random_parseval_measure(std::size_t d, std::size_t m, Rng& rng)
{
    const auto p = random_parseval(d, m, rng.next());
    Vector w(m);
    for (double& x : w)
        x = rng.uniform(0.05, 1.0);
    normalize(w);
    return push_forward_canonical(DiscreteMeasure::normalized(d, p.vectors(), std::move(w)));
}

/// mu^dag with atoms split or dropped until it has m of them, then jittered.
DiscreteMeasure local_competitor(const DiscreteMeasure& dag, std::size_t m, double step, Rng& rng)
{
    std::vector<Vector> atoms = dag.atoms();
    Vector w = dag.weights();
    while (atoms.size() < m) {
        const std::size_t j = rng.integer(0, atoms.size() - 1);
        const double a = rng.uniform(0.2, 0.8);
        atoms.push_back(atoms[j]);
        w.push_back(w[j] * (1.0 - a));
        w[j] *= a;
    }
    while (atoms.size() > m) {
        const std::size_t j = rng.integer(0, atoms.size() - 1);
        atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(j));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(j));
    }
    for (auto& a : atoms)
        for (double& c : a)
            c += step * rng.normal();
    normalize(w);
    return push_forward_canonical(DiscreteMeasure::normalized(dag.dim(), std::move(atoms), std::move(w)));
}

} // namespace

VerificationReport verify_w2_optimality(const std::vector<DiscreteMeasure>& measures, std::size_t competitors,
                                        std::uint64_t seed, double tol)
{
    const std::size_t n = measures.size();
    std::vector<TrialRecord> recs(n);
    std::vector<OptimalityStats> stats(n);
    std::vector<std::size_t> redrawn(n, 0);

    detail::parallel_for(n, [&](std::size_t t) {
        const auto& m = measures[t];
        const std::size_t d = m.dim();
        Rng rng(seed, t);
        auto& st = stats[t];
        const auto dag = push_forward_canonical(m);
        st.parseval = detail::deviation_from_identity(second_moment(dag));
        st.push_forwards = 1;
        const double best = w2_discrete(m, dag).cost;

        const auto bounds = probabilistic_frame_bounds(m);
        TrialRecord r{t, 0.0, best, bounds.lower, bounds.upper, d, m.size()};
        for (std::size_t c = 0; c < competitors; ++c) {
            const std::size_t size = rng.integer(d, 2 * m.size());
            std::optional<DiscreteMeasure> nu;
            // a thinned copy can lose rank; draw again
            for (int attempt = 0; !nu; ++attempt) {
                try {
                    nu = c % 2 == 0 ? random_parseval_measure(d, size, rng) : local_competitor(dag, size, 1e-3, rng);
                } catch (const DomainError&) {
                    ++redrawn[t];
                    if (attempt > 100)
                        throw;
                }
            }
            st.parseval = std::max(st.parseval, detail::deviation_from_identity(second_moment(*nu)));
            ++st.push_forwards;
            const double dist = w2_discrete(m, *nu).cost;
            const double sep = w2_discrete(*nu, dag).cost;
            const double growth = growth_margin(dist, best, sep, bounds.lower, tol);
            r.violation_margin = std::min({r.violation_margin, dist - best + tol, growth});
            st.min_excess = std::min(st.min_excess, dist - best);
            st.growth_failures += growth < 0.0;
            if (dist <= best + kTieGap) {
                ++st.near_ties;
                st.tie_counterexamples += sep > kTieRadius;
            }
        }
        recs[t] = r;
    });

    VerificationReport rep;
    rep.suite = "w2-optimality";
    rep.parameters = {{"measures", n}, {"competitors", competitors}, {"tol", tol}, {"seed", seed}};
    double excess = kInf;
    std::size_t ties = 0;
    std::size_t counterexamples = 0;
    std::size_t growth_fail = 0;
    std::size_t redraws = 0;
    for (std::size_t t = 0; t < n; ++t) {
        rep.add(recs[t]);
        excess = std::min(excess, stats[t].min_excess);
        ties += stats[t].near_ties;
        counterexamples += stats[t].tie_counterexamples;
        growth_fail += stats[t].growth_failures;
        redraws += redrawn[t];
        rep.push_forwards += stats[t].push_forwards;
        rep.max_parseval_deviation = std::max(rep.max_parseval_deviation, stats[t].parseval);
    }
    rep.summary = {{"min_excess", n ? excess : 0.0},
                   {"near_ties", ties},
                   {"tie_counterexamples", counterexamples},
                   {"growth_failures", growth_fail},
                   {"redrawn_competitors", redraws}};
    return rep;
}

VerificationReport verify_w2_optimality(const DiscreteMeasure& m, std::size_t competitors, std::uint64_t seed,
                                        double tol)
{
    return verify_w2_optimality(std::vector<DiscreteMeasure>{m}, competitors, seed, tol);
}

VerificationReport verify_distance_bound(const std::vector<DiscreteMeasure>& measures)
{
    const std::size_t n = measures.size();
    std::vector<TrialRecord> recs(n);
    Vector parseval(n, 0.0), slack(n, 0.0);

    detail::parallel_for(n, [&](std::size_t t) {
        const auto& m = measures[t];
        const auto dag = push_forward_canonical(m);
        parseval[t] = detail::deviation_from_identity(second_moment(dag));
        const auto b = probabilistic_frame_bounds(m);
        const double d = static_cast<double>(m.dim());
        const double lo = std::sqrt(b.lower) - 1.0;
        const double hi = std::sqrt(b.upper) - 1.0;
        const double bound = std::sqrt(d * std::max(lo * lo, hi * hi));

        double paired = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i)
            paired += m.weight(i) * squared_distance(m.atom(i), dag.atom(i));
        paired = std::sqrt(paired);
        const double exact = w2_discrete(m, dag).cost;
        slack[t] = paired - exact;

        TrialRecord r{t, bound, exact, b.lower, b.upper, m.dim(), m.size()};
        r.violation_margin = std::min(bound + 1e-10 - exact, paired + 1e-12 - exact);
        recs[t] = r;
    });

    VerificationReport rep;
    rep.suite = "distance-bound";
    rep.parameters = {{"measures", n}};
    double ratio = 0.0;
    double gap = kInf;
    for (std::size_t t = 0; t < n; ++t) {
        rep.add(recs[t]);
        rep.note_push_forward(parseval[t]);
        if (recs[t].eps > 0.0)
            ratio = std::max(ratio, recs[t].delta_observed / recs[t].eps);
        gap = std::min(gap, slack[t]);
    }
    rep.summary = {{"max_w2_over_bound", ratio}, {"min_paired_minus_exact", n ? gap : 0.0}};
    return rep;
}

VerificationReport verify_distance_bound(const DiscreteMeasure& m)
{
    return verify_distance_bound(std::vector<DiscreteMeasure>{m});
}

VerificationReport verify_split_invariance(std::size_t trials, std::uint64_t seed)
{
    constexpr double kOperatorTol = 1e-12;
    constexpr double kSumTol = 1e-10;
    std::vector<TrialRecord> recs(trials);
    Vector op_drift(trials, 0.0), sum_drift(trials, 0.0);

    detail::parallel_for(trials, [&](std::size_t t) {
        Rng rng(seed, t);
        const auto s = random_shape(rng, 5, 12);
        const auto f = random_frame(rng, s.d, s.n, t % 2 == 1);
        const std::size_t index = rng.integer(0, f.size() - 1);
        Vector a(1 + rng.integer(0, 3));
        for (double& x : a)
            x = rng.normal();
        const double len = norm(a);
        for (double& x : a)
            x /= len;
        const auto g = split_vector(f, index, a);

        op_drift[t] = max_abs_diff(frame_operator(f).matrix(), frame_operator(g).matrix());
        sum_drift[t] = std::abs(closest_parseval_sum(f) - closest_parseval_sum(g));
        const auto b = frame_bounds(f);
        TrialRecord r{t, 0.0, op_drift[t], b.lower, b.upper, f.dim(), f.size()};
        r.violation_margin = std::min(kOperatorTol - op_drift[t], kSumTol - sum_drift[t]);
        recs[t] = r;
    });

    VerificationReport rep;
    rep.suite = "split";
    rep.parameters = {{"trials", trials}, {"seed", seed}, {"operator_tol", kOperatorTol}, {"sum_tol", kSumTol}};
    for (const auto& r : recs)
        rep.add(r);
    rep.summary = {{"max_operator_drift", trials ? *std::max_element(op_drift.begin(), op_drift.end()) : 0.0},
                   {"max_sum_drift", trials ? *std::max_element(sum_drift.begin(), sum_drift.end()) : 0.0}};
    return rep;
}

} // namespace pframe
