#include "pframe/verify.hpp"

#include "parallel_for.hpp"
#include "verify_support.hpp"

#include "pframe/errors.hpp"
#include "pframe/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pframe {

using detail::kInf;

ContinuityWitness ContinuityWitness::make(double eps, double delta, double A, double B, std::size_t d)
{
    ContinuityWitness w{eps, delta, A, B, d};
    w.d_prime = delta / std::sqrt(static_cast<double>(d)) - 2.0 * eps / std::sqrt(A);
    w.C = std::min(std::sqrt(A) - eps, 1.0);
    return w;
}

bool ContinuityWitness::consistent() const
{
    const auto again = make(eps, delta, A, B, d);
    return again.d_prime == d_prime && again.C == C;
}

namespace {

constexpr double kRowTol = 1e-12;

struct Pair {
    ContinuityWitness witness;
    TrialRecord record;
    RowCheckTally tally;
    std::size_t redraws = 0;
    double parseval = 0.0;
};

Vector unit(const Vector& v)
{
    const double n = norm(v);
    Vector u = v;
    for (double& x : u)
        x /= n;
    return u;
}

Vector minus(const Vector& a, const Vector& b)
{
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        c[i] = a[i] - b[i];
    return c;
}

double sq(const Vector& v)
{
    return dot(v, v);
}

/// Row inequalities for the pair (phi, psi) written in the eigenbasis of
/// S_phi, with A, B the extreme eigenvalues of S_phi. Returns the smallest
/// margin; failures are tallied per inequality family.
double check_rows(const FiniteFrame& phi, const FiniteFrame& psi, const FiniteFrame& fphi, const FiniteFrame& fpsi,
                  double distance, double delta, RowCheckTally& tally)
{
    const auto rv = rows_in_eigenbasis(phi);
    const auto p = rows_in_basis(psi, rv.basis);
    const auto rp = rows_in_basis(fpsi, rv.basis);
    const std::size_t d = phi.dim();
    const double a = rv.eigenvalues.back();
    const double b = rv.eigenvalues.front();
    const double sa = std::sqrt(a);
    const double sb = std::sqrt(b);
    // every e > d(phi, psi) is admissible; take the tightest one we can represent
    const double e = distance * (1.0 + 1e-12);
    ++tally.pairs;

    double norm_m = kInf, dist_m = kInf, dir_m = kInf, gap_m = kInf;
    double canonical_rows = 0.0;
    const double c = std::max(1.0 - sa + e, sb + e - 1.0);
    for (std::size_t i = 0; i < d; ++i) {
        const double nr = norm(rv.rows[i]);
        const double np = norm(p[i]);
        const Vector ur = unit(rv.rows[i]);
        const Vector up = unit(p[i]);
        norm_m = std::min({norm_m, e - std::abs(nr - np), np - (sa - e), sb + e - np});
        canonical_rows += sq(minus(rv.rows[i], ur));
        dir_m = std::min(dir_m, 2.0 * e / sa - norm(minus(up, ur)));
        const double diff = sq(minus(p[i], ur)) - sq(minus(p[i], up));
        gap_m = std::min({gap_m, diff, 4.0 * e * c / sa + 4.0 * e * e / a - diff});
    }
    dist_m = frame_distance(phi, fphi) - std::sqrt(canonical_rows);

    norm_m += kRowTol;
    dist_m += kRowTol;
    dir_m += kRowTol;
    gap_m += kRowTol;
    tally.norm_failures += norm_m < 0.0;
    tally.distance_failures += dist_m < 0.0;
    tally.direction_failures += dir_m < 0.0;
    tally.gap_failures += gap_m < 0.0;
    double margin = std::min({norm_m, dist_m, dir_m, gap_m});

    // Separation: needs sqrt A > e and d' > 0 for some delta' < observed delta.
    const double dl = delta * (1.0 - 1e-12);
    const double dprime = dl / std::sqrt(static_cast<double>(d)) - 2.0 * e / sa;
    if (sa - e > 0.0 && dprime > 0.0) {
        ++tally.separation_pairs;
        const double big_c = std::min(sa - e, 1.0);
        double lhs = 0.0;
        std::size_t k = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const Vector up = unit(p[i]);
            lhs += sq(minus(p[i], rp[i])) - sq(minus(p[i], up));
            const double sep = norm(minus(unit(rv.rows[i]), rp[i]));
            if (sep > worst) {
                worst = sep;
                k = i;
            }
        }
        const double rhs = std::min(big_c * dprime * dprime, big_c * big_c);
        const double m25 = lhs - rhs + kRowTol;
        tally.separation_failures += m25 < 0.0;
        margin = std::min(margin, m25);

        if (big_c == 1.0) {
            ++tally.case_unit;
        } else {
            const double np = norm(p[k]);
            const double t = dot(rp[k], p[k]) / (np * np);
            Vector q = p[k];
            for (double& x : q)
                x *= t;
            const double eta = norm(minus(q, unit(p[k])));
            if (np + eta <= 1.0)
                ++tally.case_inside;
            else if (eta <= 1.0)
                ++tally.case_near;
            else
                ++tally.case_far;
        }
    }
    return margin;
}

void merge_tally(RowCheckTally& into, const RowCheckTally& t)
{
    into.pairs += t.pairs;
    into.norm_failures += t.norm_failures;
    into.distance_failures += t.distance_failures;
    into.direction_failures += t.direction_failures;
    into.gap_failures += t.gap_failures;
    into.separation_pairs += t.separation_pairs;
    into.separation_failures += t.separation_failures;
    into.case_unit += t.case_unit;
    into.case_inside += t.case_inside;
    into.case_near += t.case_near;
    into.case_far += t.case_far;
}

void validate(const ContinuityOptions& opt)
{
    if (!(opt.A > 0.0) || !(opt.B >= opt.A))
        throw InvalidInput("continuity: need 0 < A <= B");
    if (opt.d == 0 || opt.ladder.empty() || opt.trials == 0)
        throw InvalidInput("continuity: need d >= 1, a nonempty ladder and at least one trial");
    for (std::size_t r = 0; r < opt.ladder.size(); ++r) {
        if (!(opt.ladder[r] > 0.0))
            throw InvalidInput("continuity: ladder entries must be positive");
        if (r > 0 && !(opt.ladder[r] < opt.ladder[r - 1]))
            throw InvalidInput("continuity: ladder must be decreasing");
    }
}

std::size_t draw_count(const ContinuityOptions& opt, Rng& rng)
{
    const std::size_t lo = std::max(opt.d, opt.min_count);
    return rng.integer(lo, std::max(lo, opt.max_count));
}

ContinuityStudy assemble(std::vector<Pair>& pairs, const ContinuityOptions& opt, const std::string& suite)
{
    ContinuityStudy study;
    auto& rep = study.report;
    rep.suite = suite;
    rep.parameters = {{"A", opt.A},
                      {"B", opt.B},
                      {"d", opt.d},
                      {"N_min", std::max(opt.d, opt.min_count)},
                      {"N_max", std::max(std::max(opt.d, opt.min_count), opt.max_count)},
                      {"ladder", opt.ladder},
                      {"trials", opt.trials},
                      {"seed", opt.seed},
                      {"slack", opt.slack}};

    const std::size_t rungs = opt.ladder.size();
    study.max_delta.assign(rungs, 0.0);
    Vector mean(rungs, 0.0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::size_t r = i / opt.trials;
        auto& p = pairs[i];
        rep.add(p.record);
        rep.push_forwards += 2;
        rep.max_parseval_deviation = std::max(rep.max_parseval_deviation, p.parseval);
        study.witnesses.push_back(p.witness);
        study.redraws += p.redraws;
        merge_tally(study.row_checks, p.tally);
        study.max_delta[r] = std::max(study.max_delta[r], p.witness.delta);
        mean[r] += p.witness.delta / static_cast<double>(opt.trials);
    }

    for (const auto& w : study.witnesses)
        if (!w.consistent()) {
            rep.fail("witness constants do not recompute");
            break;
        }
    for (std::size_t r = 1; r < rungs; ++r)
        if (study.max_delta[r] > (1.0 + opt.slack) * study.max_delta[r - 1]) {
            std::ostringstream msg;
            msg << "max delta grows from " << study.max_delta[r - 1] << " at eps=" << opt.ladder[r - 1] << " to "
                << study.max_delta[r] << " at eps=" << opt.ladder[r];
            rep.fail(msg.str());
        }
    if (rungs > 1 && !(study.max_delta.back() < 0.5 * study.max_delta.front())) {
        std::ostringstream msg;
        msg << "last rung max delta " << study.max_delta.back() << " is not below half the first "
            << study.max_delta.front();
        rep.fail(msg.str());
    }

    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < rungs; ++r)
        rows.push_back({{"eps", opt.ladder[r]}, {"max_delta", study.max_delta[r]}, {"mean_delta", mean[r]}});
    rep.summary["rungs"] = rows;
    rep.summary["redraws"] = study.redraws;
    rep.summary["failures"] = rep.failures;
    return study;
}

nlohmann::json tally_json(const RowCheckTally& t)
{
    return {{"pairs", t.pairs},
            {"norm_failures", t.norm_failures},
            {"distance_failures", t.distance_failures},
            {"direction_failures", t.direction_failures},
            {"gap_failures", t.gap_failures},
            {"separation_pairs", t.separation_pairs},
            {"separation_failures", t.separation_failures},
            {"separation_cases",
             {{"unit", t.case_unit}, {"inside", t.case_inside}, {"near", t.case_near}, {"far", t.case_far}}}};
}

} // namespace

ContinuityStudy continuity_modulus_frames(const ContinuityOptions& opt)
{
    validate(opt);
    const std::size_t total = opt.ladder.size() * opt.trials;
    std::vector<Pair> pairs(total);

    detail::parallel_for(total, [&](std::size_t idx) {
        const double eps = opt.ladder[idx / opt.trials];
        Rng rng(opt.seed, idx);
        auto& out = pairs[idx];
        const std::size_t n = draw_count(opt, rng);
        const auto phi = frame_in_window(opt.d, n, opt.A, opt.B, rng);
        const Matrix base = phi.weighted_synthesis();

        FiniteFrame psi;
        for (;;) {
            Matrix z = detail::gaussian_matrix(opt.d, n, rng);
            z = (eps / z.frobenius()) * z;
            psi = detail::frame_from_columns(base + z);
            if (detail::relative_spread(frame_bounds(psi)) > kFrameFloor)
                break;
            ++out.redraws;
        }
        const double distance = frame_distance(phi, psi);
        const auto fphi = canonical_parseval(phi);
        const auto fpsi = canonical_parseval(psi);
        out.parseval = std::max(detail::deviation_from_identity(frame_operator(fphi)),
                                detail::deviation_from_identity(frame_operator(fpsi)));
        const double delta = frame_distance(fphi, fpsi);

        out.witness = ContinuityWitness::make(distance, delta, opt.A, opt.B, opt.d);
        out.record = TrialRecord{idx, distance, delta, opt.A, opt.B, opt.d, n};
        out.record.violation_margin = check_rows(phi, psi, fphi, fpsi, distance, delta, out.tally);
    });

    auto study = assemble(pairs, opt, "continuity-frames");
    study.report.summary["row_checks"] = tally_json(study.row_checks);
    return study;
}

ContinuityStudy continuity_modulus_w2(const ContinuityOptions& opt)
{
    validate(opt);
    const std::size_t total = opt.ladder.size() * opt.trials;
    std::vector<Pair> pairs(total);

    detail::parallel_for(total, [&](std::size_t idx) {
        const double eps = opt.ladder[idx / opt.trials];
        Rng rng(opt.seed, idx);
        auto& out = pairs[idx];
        const std::size_t n = draw_count(opt, rng);
        const auto base = measure_in_window(opt.d, n, opt.A, opt.B, rng);

        // the same measure written with more atoms; parent[j] is the source atom
        std::vector<Vector> split_atoms = base.atoms();
        Vector split_weights = base.weights();
        std::vector<std::size_t> parent(n);
        for (std::size_t i = 0; i < n; ++i)
            parent[i] = i;
        const std::size_t extra = 1 + rng.integer(0, n - 1);
        for (std::size_t s = 0; s < extra; ++s) {
            const std::size_t j = rng.integer(0, split_atoms.size() - 1);
            const double a = rng.uniform(0.2, 0.8);
            split_atoms.push_back(split_atoms[j]);
            split_weights.push_back(split_weights[j] * (1.0 - a));
            split_weights[j] *= a;
            parent.push_back(parent[j]);
        }
        const auto split = DiscreteMeasure::normalized(opt.d, split_atoms, split_weights);

        // Odd trials perturb the coarse copy and keep the split one as mu.
        const bool finer_mu = idx % 2 == 1;
        const DiscreteMeasure& mu = finer_mu ? split : base;
        const DiscreteMeasure& moved = finer_mu ? base : split;

        std::optional<DiscreteMeasure> nu;
        while (!nu) {
            std::vector<Vector> atoms = moved.atoms();
            double cost = 0.0;
            std::vector<Vector> z(atoms.size(), Vector(opt.d));
            for (std::size_t j = 0; j < atoms.size(); ++j) {
                for (double& x : z[j])
                    x = rng.normal();
                cost += moved.weight(j) * dot(z[j], z[j]);
            }
            const double scale = eps / std::sqrt(cost);
            for (std::size_t j = 0; j < atoms.size(); ++j)
                for (std::size_t k = 0; k < opt.d; ++k)
                    atoms[j][k] += scale * z[j][k];
            DiscreteMeasure candidate(opt.d, std::move(atoms), moved.weights());
            if (detail::relative_spread(probabilistic_frame_bounds(candidate)) > kFrameFloor)
                nu = std::move(candidate);
            else
                ++out.redraws;
        }

        const double distance = w2_discrete(mu, *nu).cost;
        const auto fmu = push_forward_canonical(mu);
        const auto fnu = push_forward_canonical(*nu);
        out.parseval = std::max(detail::deviation_from_identity(second_moment(fmu)),
                                detail::deviation_from_identity(second_moment(fnu)));
        const double delta = w2_discrete(fmu, fnu).cost;

        out.witness = ContinuityWitness::make(distance, delta, opt.A, opt.B, opt.d);
        out.record = TrialRecord{idx, distance, delta, opt.A, opt.B, opt.d, mu.size()};
        // the exact plan can cost no more than the paired one, up to solver tolerance
        out.record.violation_margin = eps + kCouplingTolerance - distance;
    });

    return assemble(pairs, opt, "continuity-w2");
}

} // namespace pframe
