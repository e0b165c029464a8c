#include "pframe/verify.hpp"

#include "verify_support.hpp"

#include "pframe/errors.hpp"
#include "pframe/spectral.hpp"
#include "pframe/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace pframe {

namespace {

/// Test functions evaluated on the push-forward y = T x.
struct Battery {
    std::size_t dim = 0;

    std::size_t size() const { return 2 * dim + 2; }

    std::vector<std::string> names() const
    {
        std::vector<std::string> n;
        for (std::size_t k = 0; k < dim; ++k)
            n.push_back("x" + std::to_string(k + 1));
        for (std::size_t k = 0; k < dim; ++k)
            n.push_back("x" + std::to_string(k + 1) + "^2");
        n.push_back("|x|^2");
        n.push_back("exp(-|x|^2/2)");
        return n;
    }

    void accumulate(std::span<const double> y, double w, Vector& out) const
    {
        const double r2 = dot(y, y);
        for (std::size_t k = 0; k < dim; ++k) {
            out[k] += w * y[k];
            out[dim + k] += w * y[k] * y[k];
        }
        out[2 * dim] += w * r2;
        out[2 * dim + 1] += w * std::exp(-0.5 * r2);
    }
};

Vector integrate(const DiscreteMeasure& m, const Battery& f)
{
    Vector out(f.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        f.accumulate(m.atom(i), m.weight(i), out);
    return out;
}

/// E exp(-|y|^2 / 2) for y ~ N(b, sigma).
double gaussian_bump(const Vector& b, const SymMatrix& sigma)
{
    const std::size_t d = b.size();
    const auto sd = sym_eig(SymMatrix(Matrix::identity(d) + sigma.matrix()));
    double det = 1.0;
    double quad = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        det *= sd.eigenvalues[k];
        const double c = dot(sd.eigenvectors.column(k), b);
        quad += c * c / sd.eigenvalues[k];
    }
    return std::exp(-0.5 * quad) / std::sqrt(det);
}

/// E exp(-r^2 / 2) with r the norm of a uniform point in the d-ball of radius R.
double ball_bump(std::size_t d, double radius)
{
    // composite Simpson on the radial density d r^(d-1) / R^d
    const std::size_t n = 20000;
    const double h = radius / static_cast<double>(n);
    auto g = [&](double r) {
        return static_cast<double>(d) * std::pow(r, static_cast<double>(d) - 1.0) /
               std::pow(radius, static_cast<double>(d)) * std::exp(-0.5 * r * r);
    };
    double s = g(0.0) + g(radius);
    for (std::size_t i = 1; i < n; ++i)
        s += (i % 2 == 1 ? 4.0 : 2.0) * g(h * static_cast<double>(i));
    return s * h / 3.0;
}

/// Scalar c with T = c I, if T is one.
std::optional<double> isotropic_scale(const Matrix& t)
{
    const std::size_t d = t.rows();
    const double c = t(0, 0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (std::abs(t(i, j) - (i == j ? c : 0.0)) > 1e-12 * std::abs(c))
                return std::nullopt;
    return c;
}

/// int f(T x) dmu(x) for every test function; nullopt entries need Monte Carlo.
std::vector<std::optional<double>> closed_form(const MeasureSpec& spec, const Matrix& t, const Battery& f)
{
    const std::size_t d = spec.dim();
    std::vector<std::optional<double>> out(f.size());
    switch (spec.family()) {
    case Family::discrete: {
        const auto& m = spec.atoms();
        Vector acc(f.size(), 0.0);
        for (std::size_t i = 0; i < m.size(); ++i)
            f.accumulate(t * m.atom(i), m.weight(i), acc);
        for (std::size_t k = 0; k < f.size(); ++k)
            out[k] = acc[k];
        return out;
    }
    case Family::gaussian: {
        const Vector b = t * spec.mean();
        const SymMatrix sigma(t * spec.covariance().matrix() * t.transpose());
        double trace = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            out[k] = b[k];
            out[d + k] = sigma(k, k) + b[k] * b[k];
            trace += *out[d + k];
        }
        out[2 * d] = trace;
        out[2 * d + 1] = gaussian_bump(b, sigma);
        return out;
    }
    case Family::uniform_sphere:
    case Family::uniform_ball: {
        const SymMatrix s(t * spec.analytic_second_moment()->matrix() * t.transpose());
        double trace = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            out[k] = 0.0;
            out[d + k] = s(k, k);
            trace += s(k, k);
        }
        out[2 * d] = trace;
        if (const auto c = isotropic_scale(t)) {
            const double r = std::abs(*c) * spec.radius();
            out[2 * d + 1] = spec.family() == Family::uniform_sphere ? std::exp(-0.5 * r * r) : ball_bump(d, r);
        }
        return out;
    }
    case Family::mixture: {
        for (auto& v : out)
            v = 0.0;
        for (const auto& c : spec.components()) {
            const auto part = closed_form(c.spec, t, f);
            for (std::size_t k = 0; k < f.size(); ++k)
                out[k] = out[k] && part[k] ? std::optional(*out[k] + c.weight * *part[k]) : std::nullopt;
        }
        return out;
    }
    case Family::sampler:
        return out;
    }
    return out;
}

/// Position of every reference atom's representative at each level, mapped
/// into the push-forward. `paths[n][i]` is the image of reference atom i.
using Paths = std::vector<std::vector<Vector>>;

double path_cost_squared(const Vector& w, const std::vector<Vector>& a, const std::vector<Vector>& b)
{
    double c = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0.0)
            c += w[i] * squared_distance(a[i], b[i]);
    return c;
}

bool nonincreasing(const std::vector<double>& v, std::size_t& at)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) {
            at = i;
            return false;
        }
    return true;
}

nlohmann::json optional_json(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

ConvergenceStudy convergence_study(const MeasureSpec& spec, const ConvergenceOptions& opt)
{
    if (opt.ladder.empty())
        throw InvalidInput("convergence: empty ladder");
    for (std::size_t r = 0; r < opt.ladder.size(); ++r)
        if (!(opt.ladder[r] > 0.0) || (r > 0 && !(opt.ladder[r] < opt.ladder[r - 1])))
            throw InvalidInput("convergence: ladder must be positive and decreasing");

    const std::size_t d = spec.dim();
    const auto moment = second_moment_matrix(spec, opt.reference_samples, opt.discretize.seed);
    const SymMatrix& s_mu = moment.value;
    const auto eig = sym_eig(s_mu);
    const FrameBounds bounds{eig.min(), eig.max()};
    const Matrix t_mu = inv_sqrt(s_mu).matrix();

    ConvergenceStudy study;
    auto& rep = study.report;
    rep.suite = "convergence";
    rep.parameters = {{"spec", spec.name()},
                      {"family", to_string(spec.family())},
                      {"dim", d},
                      {"ladder", opt.ladder},
                      {"samples", opt.discretize.samples},
                      {"seed", opt.discretize.seed},
                      {"exact_limit", opt.exact_limit},
                      {"moment_exact", moment.exact}};

    std::vector<DiscretizeResult> levels;
    for (double eps : opt.ladder)
        levels.push_back(discretize(spec, eps, opt.discretize));

    // Common refinement shared by all levels: the sample set (or the input
    // itself), or for a circle the arc partition of the finest grid.
    const bool circle = spec.family() == Family::uniform_sphere && !levels.front().sampled;
    DiscreteMeasure refinement = circle ? circle_partition(spec.radius(), levels.back().grid.cell()).measure
                                        : levels.front().reference;
    Paths paths(levels.size());
    std::vector<DiscreteMeasure> pushed;

    const Battery battery{d};
    study.test_functions = battery.names();
    auto limit = closed_form(spec, t_mu, battery);
    Vector target(battery.size(), 0.0);
    bool need_mc = false;
    for (std::size_t k = 0; k < battery.size(); ++k) {
        study.test_exact.push_back(limit[k].has_value());
        need_mc = need_mc || !limit[k];
    }
    if (need_mc) {
        const auto pts = sample_points(spec, opt.reference_samples, opt.discretize.seed + 1);
        Vector acc(battery.size(), 0.0);
        const double w = 1.0 / static_cast<double>(opt.reference_samples);
        for (std::size_t i = 0; i < opt.reference_samples; ++i)
            battery.accumulate(t_mu * std::span<const double>(pts.data() + i * d, d), w, acc);
        for (std::size_t k = 0; k < battery.size(); ++k)
            if (!limit[k])
                limit[k] = acc[k];
    }
    for (std::size_t k = 0; k < battery.size(); ++k)
        target[k] = *limit[k];

    for (std::size_t n = 0; n < levels.size(); ++n) {
        const auto& lv = levels[n];
        const SymMatrix s_n = second_moment(lv.measure);
        const Matrix t_n = inv_sqrt(s_n).matrix();
        pushed.push_back(push_forward_canonical(lv.measure));
        const auto& pf = pushed.back();

        std::vector<Vector> place(refinement.size());
        if (circle) {
            const auto q = quantize(refinement, lv.grid);
            for (const auto& e : q.coupling.entries)
                place[e.i] = t_n * q.measure.atom(e.j);
        } else {
            for (std::size_t i = 0; i < refinement.size(); ++i)
                if (lv.assignment[i] != std::numeric_limits<std::size_t>::max())
                    place[i] = t_n * lv.measure.atom(lv.assignment[i]);
        }
        paths[n] = std::move(place);

        ConvergenceRow row;
        row.eps = lv.eps;
        row.level = lv.grid.level;
        row.atoms = lv.measure.size();
        row.w2_certificate = lv.w2_bound;
        row.operator_gap = op_norm_diff(s_mu, s_n);
        row.ratio = row.w2_certificate > 0.0 ? row.operator_gap / row.w2_certificate : 0.0;
        const SymMatrix s_pf = second_moment(pf);
        row.parseval_deviation = detail::deviation_from_identity(s_pf);
        for (std::size_t k = 0; k < d; ++k)
            row.second_moment += s_pf(k, k);
        const Vector got = integrate(pf, battery);
        row.test_errors.resize(battery.size());
        for (std::size_t k = 0; k < battery.size(); ++k)
            row.test_errors[k] = got[k] - target[k];
        if (n > 0) {
            row.successive_bound = std::sqrt(path_cost_squared(refinement.weights(), paths[n - 1], paths[n]));
            if (pushed[n - 1].size() <= opt.exact_limit && pf.size() <= opt.exact_limit)
                row.successive_exact = w2_discrete(pushed[n - 1], pf).cost;
        }
        rep.note_push_forward(row.parseval_deviation);
        rep.add(TrialRecord{n, row.w2_certificate, row.operator_gap, bounds.lower, bounds.upper, d, row.atoms,
                            row.eps - row.w2_certificate});
        study.rows.push_back(std::move(row));
    }

    std::vector<double> gaps, succ_bound, succ_exact;
    for (const auto& r : study.rows) {
        gaps.push_back(r.operator_gap);
        if (r.successive_bound)
            succ_bound.push_back(*r.successive_bound);
        if (r.successive_exact)
            succ_exact.push_back(*r.successive_exact);
    }
    std::size_t at = 0;
    auto complain = [&](const char* what, const std::vector<double>& v) {
        std::ostringstream msg;
        msg << what << " grows from " << v[at - 1] << " to " << v[at] << " at step " << at;
        rep.fail(msg.str());
    };
    if (!nonincreasing(gaps, at))
        complain("operator gap", gaps);
    if (!nonincreasing(succ_bound, at))
        complain("successive W2 bound", succ_bound);
    if (!nonincreasing(succ_exact, at))
        complain("successive exact W2", succ_exact);
    const auto& last = study.rows.back();
    if (!(std::abs(last.second_moment - static_cast<double>(d)) <= last.w2_certificate)) {
        std::ostringstream msg;
        msg << "second moment of the last push-forward " << last.second_moment << " is not within "
            << last.w2_certificate << " of " << d;
        rep.fail(msg.str());
    }

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : study.rows)
        rows.push_back({{"eps", r.eps},
                        {"level", r.level},
                        {"atoms", r.atoms},
                        {"w2_certificate", r.w2_certificate},
                        {"operator_gap", r.operator_gap},
                        {"ratio", r.ratio},
                        {"successive_bound", optional_json(r.successive_bound)},
                        {"successive_exact", optional_json(r.successive_exact)},
                        {"second_moment", r.second_moment},
                        {"parseval_deviation", r.parseval_deviation},
                        {"test_errors", r.test_errors}});
    rep.summary["rows"] = rows;
    rep.summary["test_functions"] = study.test_functions;
    rep.summary["test_exact"] = study.test_exact;
    rep.summary["failures"] = rep.failures;
    double max_ratio = 0.0;
    for (const auto& r : study.rows)
        max_ratio = std::max(max_ratio, r.ratio);
    rep.summary["max_ratio"] = max_ratio;
    return study;
}

} // namespace pframe
