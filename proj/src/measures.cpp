#include "pframe/measures.hpp"

#include "pframe/errors.hpp"
#include "pframe/kernels.hpp"
#include "pframe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace pframe {

namespace {

// two-sided 99% normal quantile
constexpr double kZ99 = 2.5758293035489004;

void require_positive(double x, const char* what)
{
    if (!std::isfinite(x) || x <= 0.0)
        throw InvalidInput(std::string(what) + " must be positive and finite");
}

void require_psd(const SymMatrix& m, const char* what)
{
    const auto sd = sym_eig(m);
    if (sd.min() < -1e-12 * std::max(1.0, sd.max()))
        throw InvalidInput(std::string(what) + " is not positive semidefinite");
}

Vector cumulative_of(const Vector& w)
{
    Vector c(w.size());
    std::partial_sum(w.begin(), w.end(), c.begin());
    return c;
}

std::size_t pick(const Vector& cumulative, double u)
{
    const double total = cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * total);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

void draw_direction(Rng& rng, std::span<double> out)
{
    for (;;) {
        for (double& x : out)
            x = rng.normal();
        const double n = norm(out);
        if (n > 1e-300) {
            for (double& x : out)
                x /= n;
            return;
        }
    }
}

FrameBounds bounds_of(const SymMatrix& s)
{
    const auto sd = sym_eig(s);
    return {sd.min(), sd.max()};
}

std::vector<Vector> unpack(std::span<const double> coords, std::size_t dim)
{
    std::vector<Vector> atoms(coords.size() / dim);
    for (std::size_t i = 0; i < atoms.size(); ++i)
        atoms[i].assign(coords.begin() + static_cast<std::ptrdiff_t>(i * dim),
                        coords.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    return atoms;
}

} // namespace

std::string to_string(Family f)
{
    switch (f) {
    case Family::discrete:
        return "discrete";
    case Family::uniform_sphere:
        return "uniform_sphere";
    case Family::gaussian:
        return "gaussian";
    case Family::uniform_ball:
        return "uniform_ball";
    case Family::mixture:
        return "mixture";
    case Family::sampler:
        return "sampler";
    }
    return "unknown";
}

// ------------------------------------------------------------------ MeasureSpec

MeasureSpec MeasureSpec::discrete(DiscreteMeasure m)
{
    MeasureSpec s;
    s.family_ = Family::discrete;
    s.dim_ = m.dim();
    s.name_ = "discrete";
    s.cumulative_ = cumulative_of(m.weights());
    s.discrete_ = std::move(m);
    return s;
}

MeasureSpec MeasureSpec::uniform_sphere(std::size_t dim, double radius)
{
    if (dim == 0)
        throw InvalidInput("uniform_sphere: dimension must be positive");
    require_positive(radius, "uniform_sphere radius");
    MeasureSpec s;
    s.family_ = Family::uniform_sphere;
    s.dim_ = dim;
    s.name_ = "uniform_sphere";
    s.radius_ = radius;
    return s;
}

MeasureSpec MeasureSpec::uniform_ball(std::size_t dim, double radius)
{
    if (dim == 0)
        throw InvalidInput("uniform_ball: dimension must be positive");
    require_positive(radius, "uniform_ball radius");
    MeasureSpec s = uniform_sphere(dim, radius);
    s.family_ = Family::uniform_ball;
    s.name_ = "uniform_ball";
    return s;
}

MeasureSpec MeasureSpec::gaussian(Vector mean, SymMatrix covariance)
{
    if (mean.empty())
        throw InvalidInput("gaussian: dimension must be positive");
    if (covariance.dim() != mean.size())
        throw InvalidInput("gaussian: covariance is " + std::to_string(covariance.dim()) + "x" +
                           std::to_string(covariance.dim()) + " but mean has length " + std::to_string(mean.size()));
    for (double x : mean)
        if (!std::isfinite(x))
            throw InvalidInput("gaussian: mean has a non-finite entry");
    require_psd(covariance, "gaussian covariance");
    MeasureSpec s;
    s.family_ = Family::gaussian;
    s.dim_ = mean.size();
    s.name_ = "gaussian";
    s.cov_root_ = sqrt_spd(covariance).matrix();
    s.mean_ = std::move(mean);
    s.covariance_ = std::move(covariance);
    return s;
}

MeasureSpec MeasureSpec::mixture(std::vector<Component> components)
{
    if (components.empty())
        throw InvalidInput("mixture: needs at least one component");
    const std::size_t dim = components.front().spec.dim();
    double total = 0.0;
    for (const auto& c : components) {
        if (c.spec.dim() != dim)
            throw InvalidInput("mixture: components have different dimensions");
        if (!std::isfinite(c.weight) || c.weight < 0.0)
            throw InvalidInput("mixture: component weight is negative or non-finite");
        total += c.weight;
    }
    if (!(total > 0.0))
        throw InvalidInput("mixture: component weights sum to zero");
    MeasureSpec s;
    s.family_ = Family::mixture;
    s.dim_ = dim;
    s.name_ = "mixture";
    Vector w;
    for (auto& c : components) {
        c.weight /= total;
        w.push_back(c.weight);
    }
    s.cumulative_ = cumulative_of(w);
    s.components_ = std::move(components);
    return s;
}

MeasureSpec MeasureSpec::sampler(std::size_t dim, Draw draw, std::optional<SymMatrix> moment, std::string name)
{
    if (dim == 0)
        throw InvalidInput("sampler: dimension must be positive");
    if (!draw)
        throw InvalidInput("sampler: no generator given");
    if (moment) {
        if (moment->dim() != dim)
            throw InvalidInput("sampler: second-moment matrix has the wrong size");
        require_psd(*moment, "sampler second moment");
    }
    MeasureSpec s;
    s.family_ = Family::sampler;
    s.dim_ = dim;
    s.name_ = std::move(name);
    s.draw_ = std::move(draw);
    s.moment_ = std::move(moment);
    return s;
}

std::optional<SymMatrix> MeasureSpec::analytic_second_moment() const
{
    const std::size_t d = dim_;
    switch (family_) {
    case Family::discrete:
        return second_moment(*discrete_);
    case Family::uniform_sphere:
        return SymMatrix((radius_ * radius_ / static_cast<double>(d)) * Matrix::identity(d));
    case Family::uniform_ball:
        return SymMatrix((radius_ * radius_ / static_cast<double>(d + 2)) * Matrix::identity(d));
    case Family::gaussian: {
        Matrix s = covariance_.matrix();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                s(i, j) += mean_[i] * mean_[j];
        return SymMatrix(std::move(s));
    }
    case Family::mixture: {
        Matrix s(d, d);
        for (const auto& c : components_) {
            const auto part = c.spec.analytic_second_moment();
            if (!part)
                return std::nullopt;
            s = s + c.weight * part->matrix();
        }
        return SymMatrix(std::move(s));
    }
    case Family::sampler:
        return moment_;
    }
    return std::nullopt;
}

void MeasureSpec::draw(Rng& rng, std::span<double> out) const
{
    switch (family_) {
    case Family::discrete: {
        const auto& a = discrete_->atom(pick(cumulative_, rng.uniform()));
        std::copy(a.begin(), a.end(), out.begin());
        return;
    }
    case Family::uniform_sphere:
        draw_direction(rng, out);
        for (double& x : out)
            x *= radius_;
        return;
    case Family::uniform_ball: {
        draw_direction(rng, out);
        const double r = radius_ * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim_));
        for (double& x : out)
            x *= r;
        return;
    }
    case Family::gaussian: {
        Vector z(dim_);
        for (double& x : z)
            x = rng.normal();
        const Vector y = cov_root_ * z;
        for (std::size_t i = 0; i < dim_; ++i)
            out[i] = mean_[i] + y[i];
        return;
    }
    case Family::mixture:
        components_[pick(cumulative_, rng.uniform())].spec.draw(rng, out);
        return;
    case Family::sampler:
        draw_(rng, out);
        return;
    }
}

// -------------------------------------------------------------------- sampling

std::vector<double> sample_points(const MeasureSpec& spec, std::size_t count, std::uint64_t seed, std::size_t shards)
{
    if (shards == 0)
        throw InvalidInput("sample_points: shard count must be positive");
    const std::size_t d = spec.dim();
    std::vector<double> out(count * d);

#pragma omp parallel for schedule(static)
    for (std::int64_t si = 0; si < static_cast<std::int64_t>(shards); ++si) {
        const auto s = static_cast<std::size_t>(si);
        Rng rng(seed, s);
        for (std::size_t k = s; k < count; k += shards)
            spec.draw(rng, std::span<double>(out).subspan(k * d, d));
    }
    return out;
}

MomentEstimate second_moment_matrix(const MeasureSpec& spec, std::size_t samples, std::uint64_t seed)
{
    const std::size_t d = spec.dim();
    if (auto exact = spec.analytic_second_moment())
        return {std::move(*exact), Matrix(d, d), true, 0};
    if (samples < 2)
        throw InvalidInput("second_moment_matrix: Monte Carlo needs at least 2 samples");

    const auto pts = sample_points(spec, samples, seed);
    const kernels::PointSet ps{pts, d};
    Matrix s = kernels::second_moment_parallel(ps, {});
    Matrix var(d, d);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto x = ps.point(k);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                const double t = x[a] * x[b] - s(a, b);
                var(a, b) += t * t;
            }
    }
    const double n = static_cast<double>(samples);
    Matrix se(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
            se(a, b) = std::sqrt(var(a, b) / (n - 1.0) / n);
    return {SymMatrix(std::move(s)), std::move(se), false, samples};
}

FrameBounds probabilistic_frame_bounds(const MeasureSpec& spec, std::size_t samples, std::uint64_t seed)
{
    return bounds_of(second_moment_matrix(spec, samples, seed).value);
}

FrameBounds probabilistic_frame_bounds(const DiscreteMeasure& m)
{
    return bounds_of(second_moment(m));
}

DiscreteMeasure sample_measure(const MeasureSpec& spec, std::size_t count, std::uint64_t seed, bool match_moment)
{
    if (spec.family() == Family::discrete)
        return spec.atoms();
    if (count == 0)
        throw InvalidInput("sample_measure: sample count must be positive");
    const std::size_t d = spec.dim();
    auto pts = sample_points(spec, count, seed);
    if (match_moment) {
        if (const auto target = spec.analytic_second_moment()) {
            const SymMatrix empirical(kernels::second_moment_parallel({pts, d}, {}));
            const Matrix t = sqrt_spd(*target).matrix() * inv_sqrt(empirical).matrix();
            for (std::size_t k = 0; k < count; ++k) {
                const Vector y = t * std::span<const double>(pts).subspan(k * d, d);
                std::copy(y.begin(), y.end(), pts.begin() + static_cast<std::ptrdiff_t>(k * d));
            }
        }
    }
    return DiscreteMeasure::uniform(d, unpack(pts, d));
}

// ------------------------------------------------------------------ truncation

TruncationResult truncate(const DiscreteMeasure& m, double eps)
{
    require_positive(eps, "truncation eps");
    const std::size_t n = m.size();
    Vector norms(n);
    for (std::size_t i = 0; i < n; ++i)
        norms[i] = norm(m.atom(i));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    // Exclude whole groups of equal norm, farthest first, while the budget holds.
    std::vector<bool> excluded(n, false);
    double tail = 0.0;
    double radius = 0.0;
    bool any = false;
    for (std::size_t p = 0; p < n;) {
        std::size_t q = p;
        double group = 0.0;
        while (q < n && norms[order[q]] == norms[order[p]]) {
            group += m.weight(order[q]) * norms[order[q]] * norms[order[q]];
            ++q;
        }
        if (norms[order[p]] == 0.0 || !(tail + group < eps))
            break;
        tail += group;
        radius = norms[order[p]];
        any = true;
        for (std::size_t k = p; k < q; ++k)
            excluded[order[k]] = true;
        p = q;
    }
    if (!any) {
        const double far = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
        radius = std::nextafter(far, std::numeric_limits<double>::infinity());
    }

    TruncationResult r;
    r.radius = radius;
    r.exact = true;

    std::vector<Vector> atoms;
    Vector weights;
    std::vector<std::size_t> target(n);
    std::size_t origin = std::numeric_limits<std::size_t>::max();
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (excluded[i]) {
            moved += m.weight(i);
            continue;
        }
        if (norms[i] == 0.0 && origin == std::numeric_limits<std::size_t>::max())
            origin = atoms.size();
        target[i] = atoms.size();
        atoms.push_back(m.atom(i));
        weights.push_back(m.weight(i));
    }
    if (any) {
        if (origin == std::numeric_limits<std::size_t>::max()) {
            origin = atoms.size();
            atoms.push_back(Vector(m.dim(), 0.0));
            weights.push_back(0.0);
        }
        weights[origin] += moved;
        for (std::size_t i = 0; i < n; ++i)
            if (excluded[i])
                target[i] = origin;
    }
    DiscreteMeasure nu(m.dim(), std::move(atoms), std::move(weights));

    Coupling c{m, nu, {}};
    for (std::size_t i = 0; i < n; ++i)
        if (m.weight(i) > 0.0)
            c.entries.push_back({i, target[i], m.weight(i)});
    std::sort(c.entries.begin(), c.entries.end(),
              [](const CouplingEntry& a, const CouplingEntry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });

    r.tail = tail;
    r.tail_upper = tail;
    r.moved_mass = moved;
    r.w2_squared_bound = coupling_cost_squared(c);
    r.bounds_before = probabilistic_frame_bounds(m);
    r.bounds_after = probabilistic_frame_bounds(nu);
    r.measure = std::move(nu);
    r.coupling = std::move(c);
    return r;
}

TruncationResult truncate(const MeasureSpec& spec, double eps, const TruncationOptions& opt)
{
    if (spec.family() == Family::discrete)
        return truncate(spec.atoms(), eps);
    require_positive(eps, "truncation eps");
    if (opt.samples < 2)
        throw InvalidInput("truncate: Monte Carlo needs at least 2 samples");

    const std::size_t d = spec.dim();
    const std::size_t k = opt.samples;
    const auto pts = sample_points(spec, k, opt.seed);

    // Squared norms in descending order with prefix sums of q and q^2, so the
    // tail estimate at any radius is a binary search away.
    Vector q(k);
    for (std::size_t i = 0; i < k; ++i)
        q[i] = dot(std::span<const double>(pts).subspan(i * d, d), std::span<const double>(pts).subspan(i * d, d));
    std::sort(q.begin(), q.end(), std::greater<>());
    Vector s1(k + 1, 0.0), s2(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        s1[i + 1] = s1[i] + q[i];
        s2[i + 1] = s2[i] + q[i] * q[i];
    }
    const double kk = static_cast<double>(k);
    struct Tail {
        double mean;
        double se;
        std::size_t count;
    };
    auto tail_at = [&](double radius) {
        const double r2 = radius * radius;
        // number of samples with ||x||^2 >= r2
        const auto cnt = static_cast<std::size_t>(
            std::partition_point(q.begin(), q.end(), [&](double v) { return v >= r2; }) - q.begin());
        const double mean = s1[cnt] / kk;
        const double var = std::max(0.0, s2[cnt] / kk - mean * mean) * kk / (kk - 1.0);
        return Tail{mean, std::sqrt(var / kk), cnt};
    };

    const double target = eps / 2.0;
    double lo = 0.0;
    double hi = std::nextafter(std::sqrt(q.front()), std::numeric_limits<double>::infinity());
    if (tail_at(lo).mean <= target) {
        hi = lo;
    } else {
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (tail_at(mid).mean <= target)
                hi = mid;
            else
                lo = mid;
        }
    }
    const double radius = hi;
    const Tail t = tail_at(radius);
    // The interval alone says nothing once R clears every sample, so also
    // allow for one more draw as large as the largest seen.
    const double upper = t.mean + kZ99 * t.se + q.front() / kk;
    if (upper >= eps) {
        std::ostringstream msg;
        msg << "Monte Carlo tail at R=" << radius << " is " << t.mean << " with 99% upper limit " << upper
            << " >= eps=" << eps << "; increase the sample count";
        throw StageFailure(msg.str());
    }

    TruncationResult r;
    r.radius = radius;
    r.tail = t.mean;
    r.tail_upper = upper;
    r.exact = false;
    r.w2_squared_bound = upper;
    r.moved_mass = static_cast<double>(t.count) / kk;

    const Matrix before = kernels::second_moment_parallel({pts, d}, {});
    auto clipped = pts;
    for (std::size_t i = 0; i < k; ++i) {
        auto x = std::span<double>(clipped).subspan(i * d, d);
        if (dot(x, x) >= radius * radius)
            std::fill(x.begin(), x.end(), 0.0);
    }
    r.bounds_before = bounds_of(spec.analytic_second_moment().value_or(SymMatrix(before)));
    r.bounds_after = bounds_of(SymMatrix(kernels::second_moment_parallel({clipped, d}, {})));

    const MeasureSpec base = spec;
    r.spec = MeasureSpec::sampler(
        d,
        [base, radius](Rng& rng, std::span<double> out) {
            base.draw(rng, out);
            if (dot(out, out) >= radius * radius)
                std::fill(out.begin(), out.end(), 0.0);
        },
        std::nullopt, "truncated " + spec.name());
    return r;
}

// ---------------------------------------------------------------- quantization

double QuantizationGrid::cell() const
{
    return std::ldexp(base, -static_cast<int>(level - 1));
}

double QuantizationGrid::diameter() const
{
    const double full = cell() * std::sqrt(static_cast<double>(dim));
    return centered ? 0.5 * full : full;
}

double QuantizationGrid::operator_bound() const
{
    const double dn = diameter();
    return dn * dn + 2.0 * dn * (radius + dn);
}

std::int64_t QuantizationGrid::cells_per_axis() const
{
    return 2 * static_cast<std::int64_t>(std::ceil(radius / cell()));
}

QuantizationGrid QuantizationGrid::refined() const
{
    QuantizationGrid g = *this;
    ++g.level;
    return g;
}

QuantizationResult quantize(const DiscreteMeasure& m, const QuantizationGrid& grid)
{
    if (grid.dim != m.dim())
        throw InvalidInput("quantize: grid dimension does not match the measure");
    if (!std::isfinite(grid.base) || grid.base <= 0.0 || grid.level == 0)
        throw InvalidInput("quantize: grid needs a positive base cell and level >= 1");
    const std::size_t d = m.dim();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double r = norm(m.atom(i));
        if (r > 0.0 && !(r < grid.radius)) {
            std::ostringstream msg;
            msg << "quantize: atom " << i << " has norm " << r << ", outside the grid's ball of radius "
                << grid.radius;
            throw DomainError(msg.str());
        }
    }

    const double h = grid.cell();
    const auto coords = m.packed();
    const auto idx = kernels::cell_indices_parallel({coords, d}, h);

    std::map<std::vector<std::int64_t>, std::size_t> cells;
    std::vector<std::size_t> slot(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.weight(i) == 0.0)
            continue;
        std::vector<std::int64_t> key(idx.begin() + static_cast<std::ptrdiff_t>(i * d),
                                      idx.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
        cells.emplace(std::move(key), 0);
    }
    std::vector<Vector> atoms;
    atoms.reserve(cells.size());
    for (auto& [key, index] : cells) {
        index = atoms.size();
        Vector c(d);
        for (std::size_t a = 0; a < d; ++a)
            c[a] = grid.centered ? (static_cast<double>(key[a]) + 0.5) * h : static_cast<double>(key[a]) * h;
        atoms.push_back(std::move(c));
    }
    Vector weights(atoms.size(), 0.0);
    Coupling gamma;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.weight(i) == 0.0)
            continue;
        const std::vector<std::int64_t> key(idx.begin() + static_cast<std::ptrdiff_t>(i * d),
                                            idx.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
        const std::size_t j = cells.at(key);
        weights[j] += m.weight(i);
        gamma.entries.push_back({i, j, m.weight(i)});
    }

    QuantizationResult r;
    r.measure = DiscreteMeasure(d, std::move(atoms), std::move(weights));
    gamma.source = m;
    gamma.target = r.measure;
    r.coupling = std::move(gamma);
    r.w2_bound = grid.diameter();
    r.operator_bound = grid.operator_bound();
    r.coupling_cost = coupling_cost(r.coupling);
    r.operator_deviation = op_norm_diff(second_moment(m), second_moment(r.measure));
    return r;
}

// ------------------------------------------------------------------- circles

ArcPartition circle_partition(double radius, double cell)
{
    require_positive(radius, "circle radius");
    require_positive(cell, "grid cell");
    const double two_pi = 2.0 * std::numbers::pi;
    Vector cuts{0.0, two_pi};
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell));
    for (std::int64_t k = -reach; k <= reach; ++k) {
        const double v = static_cast<double>(k) * cell;
        if (!(std::abs(v) < radius))
            continue;
        // x = v at angles +-acos, y = v at asin and pi - asin
        const double a = std::acos(v / radius);
        const double b = std::asin(v / radius);
        cuts.push_back(a);
        cuts.push_back(two_pi - a);
        cuts.push_back(b < 0.0 ? b + two_pi : b);
        cuts.push_back(std::numbers::pi - b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    ArcPartition p;
    p.radius = radius;
    std::vector<Vector> atoms;
    Vector weights;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double t0 = cuts[i];
        const double t1 = cuts[i + 1];
        if (!(t1 > t0))
            continue;
        const double mid = 0.5 * (t0 + t1);
        atoms.push_back({radius * std::cos(mid), radius * std::sin(mid)});
        weights.push_back((t1 - t0) / two_pi);
        p.begin.push_back(t0);
        p.end.push_back(t1);
    }
    p.measure = DiscreteMeasure::normalized(2, std::move(atoms), std::move(weights));
    return p;
}

double arc_cost_squared(const ArcPartition& p, const std::vector<Vector>& anchors)
{
    if (anchors.size() != p.begin.size())
        throw InvalidInput("arc_cost_squared: one anchor per arc is required");
    const double r = p.radius;
    double total = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const auto& c = anchors[i];
        const double t0 = p.begin[i];
        const double t1 = p.end[i];
        // int_{t0}^{t1} ||r e(t) - c||^2 dt / 2 pi
        const double v = (r * r + c[0] * c[0] + c[1] * c[1]) * (t1 - t0) -
                         2.0 * r * (c[0] * (std::sin(t1) - std::sin(t0)) - c[1] * (std::cos(t1) - std::cos(t0)));
        total += std::max(0.0, v) / (2.0 * std::numbers::pi);
    }
    return total;
}

// -------------------------------------------------------------- discretization

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> targets_of(const Coupling& c, std::size_t n)
{
    std::vector<std::size_t> t(n, kUnassigned);
    for (const auto& e : c.entries)
        t[e.i] = e.j;
    return t;
}

QuantizationGrid choose_grid(std::size_t dim, double radius, double eps, const DiscretizeOptions& opt)
{
    QuantizationGrid grid{dim, radius, 1, radius, opt.centered};
    while (!(grid.diameter() < eps / 2.0 && grid.operator_bound() <= eps / 2.0)) {
        grid = grid.refined();
        if (grid.level > opt.max_level)
            throw StageFailure("discretize: no grid level up to " + std::to_string(opt.max_level) +
                               " meets the eps/2 budget");
    }
    return grid;
}

DiscretizeResult discretize_circle(const MeasureSpec& spec, double eps, const DiscretizeOptions& opt)
{
    const double rho = spec.radius();
    // arc midpoints carry rounding in their norm
    const double radius = rho * (1.0 + 1e-12);
    const SymMatrix s = *spec.analytic_second_moment();

    DiscretizeResult out;
    out.eps = eps;
    out.exact_cells = true;
    out.bounds_in = bounds_of(s);
    out.grid = choose_grid(2, radius, eps, opt);

    const auto arcs = circle_partition(rho, out.grid.cell());
    out.reference = arcs.measure;

    auto& t = out.truncation;
    t.radius = radius;
    t.exact = true;
    t.bounds_before = t.bounds_after = out.bounds_in;
    Coupling identity{out.reference, out.reference, {}};
    for (std::size_t i = 0; i < out.reference.size(); ++i)
        identity.entries.push_back({i, i, out.reference.weight(i)});
    t.measure = out.reference;
    t.coupling = std::move(identity);

    auto q = quantize(out.reference, out.grid);
    out.assignment = targets_of(q.coupling, out.reference.size());
    std::vector<Vector> anchors;
    anchors.reserve(out.assignment.size());
    for (std::size_t j : out.assignment)
        anchors.push_back(q.measure.atom(j));
    out.quantization_cost = std::sqrt(arc_cost_squared(arcs, anchors));
    out.operator_deviation = op_norm_diff(s, second_moment(q.measure));
    out.measure = std::move(q.measure);
    out.bounds_out = probabilistic_frame_bounds(out.measure);
    out.w2_bound_a_priori = out.grid.diameter();
    out.w2_bound = out.quantization_cost;
    return out;
}

} // namespace

DiscretizeResult discretize(const MeasureSpec& spec, double eps, const DiscretizeOptions& opt)
{
    require_positive(eps, "discretize eps");
    const double budget = std::min(eps * eps / 4.0, eps / 2.0);
    // A circle has no tail to cut unless the budget swallows all of it.
    if (spec.family() == Family::uniform_sphere && spec.dim() == 2 && spec.radius() * spec.radius() >= budget)
        return discretize_circle(spec, eps, opt);

    DiscretizeResult out;
    out.eps = eps;
    out.sampled = spec.family() != Family::discrete;
    out.exact_cells = !out.sampled;
    out.reference = sample_measure(spec, opt.samples, opt.seed, true);
    out.bounds_in = probabilistic_frame_bounds(out.reference);
    if (!(out.bounds_in.lower > kFrameFloor * out.bounds_in.upper)) {
        std::ostringstream msg;
        msg << "not a probabilistic frame: lower bound " << out.bounds_in.lower << " ~ 0";
        throw DomainError(msg.str());
    }

    out.truncation = truncate(out.reference, budget);
    out.grid = choose_grid(spec.dim(), out.truncation.radius, eps, opt);

    auto q = quantize(*out.truncation.measure, out.grid);
    const auto cut = targets_of(*out.truncation.coupling, out.reference.size());
    const auto cell = targets_of(q.coupling, out.truncation.measure->size());
    out.assignment.resize(cut.size(), kUnassigned);
    for (std::size_t i = 0; i < cut.size(); ++i)
        if (cut[i] != kUnassigned)
            out.assignment[i] = cell[cut[i]];

    out.quantization_cost = q.coupling_cost;
    out.operator_deviation = op_norm_diff(second_moment(out.reference), second_moment(q.measure));
    out.measure = std::move(q.measure);
    out.bounds_out = probabilistic_frame_bounds(out.measure);

    const double trunc = std::sqrt(std::max(0.0, out.truncation.w2_squared_bound));
    out.w2_bound_a_priori = trunc + out.grid.diameter();
    out.w2_bound = trunc + out.quantization_cost;
    return out;
}

ParsevalResult approx_parseval(const MeasureSpec& spec, double eps, const DiscretizeOptions& opt)
{
    require_positive(eps, "approx_parseval eps");
    const std::size_t d = spec.dim();
    const auto s = second_moment_matrix(spec, opt.samples, opt.seed);
    const double deviation = op_norm_diff(s.value, SymMatrix::identity(d));
    const double tol = s.exact ? 1e-6 : 3.0 * s.standard_error.frobenius();
    if (deviation > tol) {
        std::ostringstream msg;
        msg << "input is not Parseval: ||S - I|| = " << deviation << " > " << tol;
        throw DomainError(msg.str());
    }

    ParsevalResult r;
    r.discretization = discretize(spec, eps / (1.0 + std::sqrt(static_cast<double>(d))), opt);
    r.measure = push_forward_canonical(r.discretization.measure);
    r.canonical_cost = std::sqrt(closest_parseval_sum(r.discretization.measure.as_frame()));
    r.w2_bound = r.discretization.w2_bound + r.canonical_cost;
    r.parseval_deviation = op_norm_diff(second_moment(r.measure), SymMatrix::identity(d));
    return r;
}

} // namespace pframe
