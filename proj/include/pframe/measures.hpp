#pragma once

#include "pframe/discrete_measure.hpp"
#include "pframe/frames.hpp"
#include "pframe/rng.hpp"
#include "pframe/transport.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pframe {

enum class Family { discrete, uniform_sphere, gaussian, uniform_ball, mixture, sampler };

std::string to_string(Family f);

/// Description of a probability measure on R^d that can be sampled and, for
/// the analytic families, integrated in closed form.
class MeasureSpec {
public:
    using Draw = std::function<void(Rng&, std::span<double>)>;

    struct Component;

    static MeasureSpec discrete(DiscreteMeasure m);
    static MeasureSpec uniform_sphere(std::size_t dim, double radius);
    static MeasureSpec uniform_ball(std::size_t dim, double radius);
    static MeasureSpec gaussian(Vector mean, SymMatrix covariance);
    /// Weights are normalized; all components must share a dimension.
    static MeasureSpec mixture(std::vector<Component> components);
    /// Arbitrary seeded generator. `moment`, when given, must be symmetric PSD
    /// and is used instead of Monte Carlo.
    static MeasureSpec sampler(std::size_t dim, Draw draw, std::optional<SymMatrix> moment = std::nullopt,
                               std::string name = "sampler");

    Family family() const { return family_; }
    std::size_t dim() const { return dim_; }
    const std::string& name() const { return name_; }

    const DiscreteMeasure& atoms() const { return *discrete_; }
    double radius() const { return radius_; }
    const Vector& mean() const { return mean_; }
    const SymMatrix& covariance() const { return covariance_; }
    const std::vector<Component>& components() const { return components_; }

    /// Closed-form second moment, if this family has one.
    std::optional<SymMatrix> analytic_second_moment() const;

    /// One sample into `out` (length dim).
    void draw(Rng& rng, std::span<double> out) const;

    /// Seed carried by a spec file, if any.
    std::optional<std::uint64_t> seed;

private:
    Family family_ = Family::discrete;
    std::size_t dim_ = 0;
    std::string name_;
    std::optional<DiscreteMeasure> discrete_;
    double radius_ = 0.0;
    Vector mean_;
    SymMatrix covariance_;
    Matrix cov_root_;
    std::vector<Component> components_;
    Vector cumulative_;
    Draw draw_;
    std::optional<SymMatrix> moment_;
};

struct MeasureSpec::Component {
    double weight = 0.0;
    MeasureSpec spec;
};

inline constexpr std::size_t kDefaultShards = 16;

/// `count` samples packed row-major. Sample k comes from shard k mod `shards`
/// with substream (seed, shard), so the output depends on the seed and the
/// shard count but not on the number of threads.
std::vector<double> sample_points(const MeasureSpec& spec, std::size_t count, std::uint64_t seed,
                                  std::size_t shards = kDefaultShards);

struct MomentEstimate {
    SymMatrix value;
    /// Entrywise standard error; zero when exact.
    Matrix standard_error;
    bool exact = true;
    std::size_t samples = 0;

    /// Largest standard error over the entries.
    double max_standard_error() const { return standard_error.max_abs(); }
};

/// S_mu = E[X X^T]. Closed form when available, otherwise Monte Carlo with
/// `samples` draws (0 is rejected).
MomentEstimate second_moment_matrix(const MeasureSpec& spec, std::size_t samples, std::uint64_t seed);

/// (lambda_min, lambda_max) of S_mu.
FrameBounds probabilistic_frame_bounds(const MeasureSpec& spec, std::size_t samples, std::uint64_t seed);
FrameBounds probabilistic_frame_bounds(const DiscreteMeasure& m);

/// Empirical measure of `count` seeded samples. With `match_moment` and an
/// analytic S, atoms are mapped by S^{1/2} S_hat^{-1/2} so that the empirical
/// second moment equals S exactly. Discrete specs are returned as they are.
DiscreteMeasure sample_measure(const MeasureSpec& spec, std::size_t count, std::uint64_t seed, bool match_moment);

// ---------------------------------------------------------------- truncation

struct TruncationOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

struct TruncationResult {
    /// Kept support is the open ball ||x|| < radius; the rest sits at 0.
    double radius = 0.0;
    /// int_{||x|| >= R} ||x||^2 dmu: exact for discrete input, otherwise a
    /// Monte Carlo estimate with its 99% upper confidence limit.
    double tail = 0.0;
    double tail_upper = 0.0;
    bool exact = true;
    /// Squared W2 bound from the coupling that fixes the ball and sends the
    /// rest to the origin. Certified only when `exact`.
    double w2_squared_bound = 0.0;
    double moved_mass = 0.0;
    FrameBounds bounds_before;
    FrameBounds bounds_after;

    std::optional<DiscreteMeasure> measure;
    std::optional<Coupling> coupling;
    std::optional<MeasureSpec> spec;
};

/// Moves the mass outside a ball to the origin with tail second moment < eps.
/// Discrete input: excludes as many of the farthest atoms as the budget
/// allows, exactly. Otherwise: bisection on a Monte Carlo tail estimate,
/// targeting eps/2 and refusing when the 99% upper limit, plus one more draw
/// as large as the largest seen, reaches eps.
TruncationResult truncate(const DiscreteMeasure& m, double eps);
TruncationResult truncate(const MeasureSpec& spec, double eps, const TruncationOptions& opt);

// -------------------------------------------------------------- quantization

/// Half-open cubes c_k + [0, h)^d with anchors c_k on the lattice h Z^d
/// (so 0 is an anchor), h = base / 2^(level-1).
struct QuantizationGrid {
    std::size_t dim = 0;
    double base = 1.0;
    std::size_t level = 1;
    /// Radius of the ball the grid must cover.
    double radius = 0.0;
    /// Represent each cube by its centre instead of its anchor corner.
    bool centered = false;

    double cell() const;
    /// Largest distance from a point of a cube to its representative.
    double diameter() const;
    /// Bound on ||S_mu - S_quantized||_op: d^2 + 2 d (R + d).
    double operator_bound() const;
    /// Cubes per axis in the smallest grid-aligned cover of B(0, R).
    std::int64_t cells_per_axis() const;
    QuantizationGrid refined() const;
};

struct QuantizationResult {
    DiscreteMeasure measure;
    /// gamma_n: each source atom goes entirely to its cube's representative.
    Coupling coupling;
    double w2_bound = 0.0;
    double operator_bound = 0.0;
    /// Cost of gamma_n (an upper bound on W2) and the actual operator gap.
    double coupling_cost = 0.0;
    double operator_deviation = 0.0;
};

/// Throws DomainError if some atom lies outside the open ball of the grid.
QuantizationResult quantize(const DiscreteMeasure& m, const QuantizationGrid& grid);

/// Uniform measure on the circle of radius `radius` in R^2, cut wherever it
/// crosses a line x = k cell or y = k cell. Every arc lies inside one cube of
/// that grid and of each coarser grid cell * 2^j, so quantizing the arc
/// midpoints gives the exact cube masses.
struct ArcPartition {
    double radius = 0.0;
    /// Atoms at arc midpoints, weights arc length / circumference.
    DiscreteMeasure measure;
    Vector begin;
    Vector end;
};

ArcPartition circle_partition(double radius, double cell);

/// int ||x - c(x)||^2 over the circle when arc i is sent to anchors[i].
double arc_cost_squared(const ArcPartition& p, const std::vector<Vector>& anchors);

// ------------------------------------------------------------ discretization

struct DiscretizeOptions {
    /// Sample count for non-discrete specs.
    std::size_t samples = 20000;
    std::uint64_t seed = 0;
    bool centered = false;
    std::size_t max_level = 40;
};

struct DiscretizeResult {
    DiscreteMeasure measure;
    /// Discrete measure that was quantized: the input itself when it is
    /// discrete, the arc partition for a circle, otherwise the moment-matched
    /// sample set.
    DiscreteMeasure reference;
    bool sampled = false;
    /// Cube masses are those of the spec itself (discrete input or circle).
    bool exact_cells = false;
    /// Output atom receiving each reference atom; npos for zero weights.
    std::vector<std::size_t> assignment;

    double eps = 0.0;
    FrameBounds bounds_in;
    FrameBounds bounds_out;
    TruncationResult truncation;
    QuantizationGrid grid;
    double quantization_cost = 0.0;
    double operator_deviation = 0.0;

    /// sqrt(tail) + d_n; strictly below eps by construction.
    double w2_bound_a_priori = 0.0;
    /// sqrt(tail) + cost of gamma_n; what the certificate reports.
    double w2_bound = 0.0;

    bool lower_ok() const { return bounds_out.lower >= bounds_in.lower - eps; }
    bool upper_ok() const { return bounds_out.upper <= bounds_in.upper + eps; }
    bool w2_ok() const { return w2_bound < eps; }
};

/// Truncate with tail budget min(eps^2/4, eps/2), then quantize at the
/// coarsest level with d_n < eps/2 and d_n^2 + 2 d_n (R + d_n) <= eps/2.
/// A uniform circle is quantized exactly through its arc partition.
DiscretizeResult discretize(const MeasureSpec& spec, double eps, const DiscretizeOptions& opt);

struct ParsevalResult {
    DiscretizeResult discretization;
    DiscreteMeasure measure;
    /// Exact W2 between the discretization and its push-forward.
    double canonical_cost = 0.0;
    /// Bound on W2(reference, output).
    double w2_bound = 0.0;
    double parseval_deviation = 0.0;
};

/// Input must be Parseval: ||S - I|| <= 1e-6 for analytic S, 3 standard
/// errors for Monte Carlo. Runs discretize at eps / (1 + sqrt d) and pushes
/// the result forward, so the total bound stays below eps.
ParsevalResult approx_parseval(const MeasureSpec& spec, double eps, const DiscretizeOptions& opt);

} // namespace pframe
