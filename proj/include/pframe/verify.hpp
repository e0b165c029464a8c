#pragma once

#include "pframe/discrete_measure.hpp"
#include "pframe/frames.hpp"
#include "pframe/measures.hpp"
#include "pframe/rng.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pframe {

/// One row of the per-trial CSV. `eps` is the trial's input size (perturbation
/// or certified bound) and `delta_observed` what was measured; suites without
/// an input size leave eps at 0.
struct TrialRecord {
    std::size_t trial = 0;
    double eps = 0.0;
    double delta_observed = 0.0;
    double A = 0.0;
    double B = 0.0;
    std::size_t d = 0;
    std::size_t N = 0;
    /// Smallest slack over the trial's inequalities, tolerance included.
    /// Negative means violated.
    double violation_margin = std::numeric_limits<double>::infinity();
};

struct VerificationReport {
    std::string suite;
    std::size_t trials = 0;
    /// Violated trials plus suite-level failures.
    std::size_t violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json summary = nlohmann::json::object();
    std::vector<TrialRecord> records;
    std::vector<std::string> failures;

    /// Every push-forward the suite built: count and largest ||S - I||_op.
    std::size_t push_forwards = 0;
    double max_parseval_deviation = 0.0;

    bool pass() const { return violations == 0; }

    /// Appends a trial and counts it as a violation if its margin is negative.
    void add(const TrialRecord& r);
    void fail(std::string reason);
    void note_push_forward(double deviation);
};

/// trial,eps,delta_observed,A,B,d,N,violation_margin with 17 significant digits.
void write_trials_csv(std::ostream& out, const VerificationReport& r);

// ------------------------------------------------------------------ corpora

/// Frames with 1 <= d <= max_dim and d <= N <= max_count; even indices carry
/// unit weights, odd ones weights in [0.2, 2]. Redrawn until
/// lambda_min > 1e-3 lambda_max.
std::vector<FiniteFrame> frame_corpus(std::size_t count, std::uint64_t seed, std::size_t max_dim = 5,
                                      std::size_t max_count = 12);

/// Discrete probabilistic frames with 1 <= d <= max_dim and d <= N <= max_atoms,
/// weights in [0.05, 1] normalized, same conditioning as frame_corpus.
std::vector<DiscreteMeasure> measure_corpus(std::size_t count, std::uint64_t seed, std::size_t max_dim = 3,
                                            std::size_t max_atoms = 8);

/// Unit-weight frame of n vectors whose frame operator has spectrum in
/// [lower, upper], with both ends attained when d >= 2.
FiniteFrame frame_in_window(std::size_t d, std::size_t n, double lower, double upper, Rng& rng);

/// Same for a probabilistic frame with random weights.
DiscreteMeasure measure_in_window(std::size_t d, std::size_t n, double lower, double upper, Rng& rng);

// -------------------------------------------------------------- optimality

struct OptimalityOptions {
    std::size_t competitors = 1000;
    /// Tangent steps at the canonical frame, projected back by F.
    std::size_t probes = 50;
    double step = 1e-3;
    double tol = 1e-12;
};

/// d(Phi, Psi) >= d(Phi, Phi^dag) - tol for random Parseval Psi and for
/// re-canonicalized tangent steps. Uniqueness is checked quantitatively:
/// d(Phi, Psi)^2 - d(Phi, Phi^dag)^2 >= sqrt(A) d(Psi, Phi^dag)^2. Competitors
/// within 1e-9 of the optimum but farther than 1e-6 from Phi^dag are counted
/// in the summary as tie_counterexamples without failing the suite.
VerificationReport verify_finite_optimality(const std::vector<FiniteFrame>& frames, const OptimalityOptions& opt,
                                            std::uint64_t seed);
/// `trials` random frames of shape d x n.
VerificationReport verify_finite_optimality(std::size_t d, std::size_t n, std::size_t trials,
                                            std::size_t competitors, std::uint64_t seed);

/// W2(mu, nu) >= W2(mu, mu^dag) - tol for finite Parseval nu with d <= M <= 2N
/// atoms. Half are random Parseval systems with random weights,
/// re-canonicalized; half are perturbed, split or thinned copies of mu^dag.
/// Same growth check in W2: W2(mu, nu)^2 - W2(mu, mu^dag)^2 >= sqrt(A) W2(nu, mu^dag)^2.
VerificationReport verify_w2_optimality(const std::vector<DiscreteMeasure>& measures, std::size_t competitors,
                                        std::uint64_t seed, double tol = 1e-9);
VerificationReport verify_w2_optimality(const DiscreteMeasure& m, std::size_t competitors, std::uint64_t seed,
                                        double tol = 1e-9);

/// W2(mu, mu^dag) <= sqrt(d max((sqrt A - 1)^2, (sqrt B - 1)^2)) + 1e-10,
/// with W2 solved exactly, and W2 <= the index-paired cost.
VerificationReport verify_distance_bound(const std::vector<DiscreteMeasure>& measures);
VerificationReport verify_distance_bound(const DiscreteMeasure& m);

/// Frame operator drift <= 1e-12 and closest-Parseval sum drift <= 1e-10
/// under random vector splits.
VerificationReport verify_split_invariance(std::size_t trials, std::uint64_t seed);

// -------------------------------------------------------------- continuity

/// One perturbation: eps = d(Phi, Psi) or W2(mu, nu), delta = the same
/// distance between the canonical images, [A, B] the sampling window.
/// d_prime = delta / sqrt(d) - 2 eps / sqrt(A), C = min(sqrt(A) - eps, 1).
struct ContinuityWitness {
    double eps = 0.0;
    double delta = 0.0;
    double A = 0.0;
    double B = 0.0;
    std::size_t d = 0;
    double d_prime = 0.0;
    double C = 0.0;

    static ContinuityWitness make(double eps, double delta, double A, double B, std::size_t d);
    /// d_prime and C recomputed from the stored fields match bit for bit.
    bool consistent() const;
};

struct ContinuityOptions {
    double A = 0.5;
    double B = 2.0;
    std::size_t d = 3;
    std::size_t min_count = 3;
    std::size_t max_count = 8;
    Vector ladder{0.2, 0.1, 0.05, 0.025};
    std::size_t trials = 200;
    std::uint64_t seed = 0;
    /// Allowed growth of the max delta from one rung to the next.
    double slack = 0.05;
};

/// Pair counts for the row inequalities. Each check is tallied only on pairs
/// that meet its hypotheses.
struct RowCheckTally {
    std::size_t pairs = 0;
    std::size_t norm_failures = 0;      // | ||R_i|| - ||P_i|| | < eps and the sqrt A, sqrt B window
    std::size_t distance_failures = 0;  // d(Phi, F(Phi)) >= sqrt(sum ||R_i - R_i/||R_i||||^2)
    std::size_t direction_failures = 0; // ||P_i/||P_i|| - R_i/||R_i|||| < 2 eps / sqrt A
    std::size_t gap_failures = 0;       // 0 <= difference of squared distances <= 4 eps c / sqrt A + 4 eps^2 / A
    /// Pairs with sqrt A > eps, d' > 0 and delta > 0.
    std::size_t separation_pairs = 0;
    std::size_t separation_failures = 0;
    /// Case of the separated row k: C = 1; ||P_k|| + eta <= 1; eta <= 1; eta > 1.
    std::size_t case_unit = 0;
    std::size_t case_inside = 0;
    std::size_t case_near = 0;
    std::size_t case_far = 0;
};

struct ContinuityStudy {
    VerificationReport report;
    std::vector<ContinuityWitness> witnesses;
    /// Largest delta per rung.
    Vector max_delta;
    /// Perturbations redrawn because Psi or nu stopped being a frame.
    std::size_t redraws = 0;
    RowCheckTally row_checks;
};

/// Frames in F_{A,B}, Gaussian perturbations rescaled to d(Phi, Psi) = eps.
/// Asserts the max delta is nonincreasing along the ladder within `slack`,
/// that the last rung's max is below half the first's, and every row
/// inequality on pairs meeting its hypotheses.
ContinuityStudy continuity_modulus_frames(const ContinuityOptions& opt);

/// Probabilistic frames with different cardinalities: nu is a split of mu with
/// perturbed atoms, or mu is split and nu perturbed, rescaled so that the
/// index-paired cost is eps; eps is then replaced by the exact W2.
ContinuityStudy continuity_modulus_w2(const ContinuityOptions& opt);

// ------------------------------------------------------------- convergence

struct ConvergenceOptions {
    Vector ladder{0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625};
    DiscretizeOptions discretize;
    /// Solve successive W2 exactly when both supports are at most this size.
    std::size_t exact_limit = 2000;
    /// Monte Carlo size for S_mu or test integrals without a closed form.
    std::size_t reference_samples = 200000;
};

struct ConvergenceRow {
    double eps = 0.0;
    std::size_t level = 0;
    std::size_t atoms = 0;
    double w2_certificate = 0.0;
    double operator_gap = 0.0;
    double ratio = 0.0;
    /// Distance from the previous rung's push-forward: a coupling bound
    /// through a common refinement, and the exact W2 when small enough.
    std::optional<double> successive_bound;
    std::optional<double> successive_exact;
    double second_moment = 0.0;
    double parseval_deviation = 0.0;
    /// int f d mu_n^dag - int f d mu^dag for each test function.
    Vector test_errors;
};

struct ConvergenceStudy {
    VerificationReport report;
    std::vector<ConvergenceRow> rows;
    std::vector<std::string> test_functions;
    /// Whether int f d mu^dag came from a closed form (else Monte Carlo).
    std::vector<bool> test_exact;
};

/// Discretizes along the ladder and pushes each result forward. Asserts that
/// ||S_mu - S_mu_n||_op, the successive coupling bounds and the successive
/// exact W2 values are nonincreasing, and that int ||x||^2 d mu_n^dag is
/// within the last certificate of d. The gap/certificate ratio is reported.
ConvergenceStudy convergence_study(const MeasureSpec& spec, const ConvergenceOptions& opt);

} // namespace pframe
