#include "pframe/cli.hpp"

#include "pframe/errors.hpp"
#include "pframe/io.hpp"
#include "pframe/spectral.hpp"
#include "pframe/transport.hpp"
#include "pframe/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace pframe {

using nlohmann::json;

namespace {

const std::vector<std::string> kSuites{"finite-optimality", "w2-optimality", "distance-bound", "continuity-frames",
                                       "continuity-w2",     "convergence",   "split"};

struct Global {
    std::optional<std::uint64_t> seed;
    double tol = 1e-9;
    std::string format = "json";
    std::string out;
};

struct VerifyArgs {
    std::string suite;
    std::optional<std::size_t> trials;
    std::size_t competitors = 1000;
    std::size_t probes = 50;
    double A = 0.5;
    double B = 2.0;
    std::size_t dim = 3;
    std::string spec;
    std::size_t samples = 20000;
    std::string csv;
};

std::uint64_t require_seed(const Global& g, const std::string& command)
{
    if (!g.seed)
        throw InvalidInput(command + ": --seed is required");
    return *g.seed;
}

std::string g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_atoms_csv(std::ostream& out, const std::vector<Vector>& atoms, const Vector& weights)
{
    const std::size_t d = atoms.empty() ? 0 : atoms.front().size();
    out << "weight";
    for (std::size_t k = 0; k < d; ++k)
        out << ",x" << k + 1;
    out << '\n';
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        out << g17(weights[i]);
        for (double x : atoms[i])
            out << ',' << g17(x);
        out << '\n';
    }
}

/// Where a command's report goes: --out if given, else the console stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& console) : console_(console)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw InvalidInput("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : console_; }

private:
    std::ofstream file_;
    std::ostream& console_;
};

void emit(const Global& g, std::ostream& console, const std::string& command, const json& result,
          const std::function<void(std::ostream&)>& csv)
{
    Sink sink(g.out, console);
    if (g.format == "csv")
        csv(sink.stream());
    else
        sink.stream() << envelope(command, g.seed, result).dump(2) << '\n';
}

/// Spectral summary shared by frames and measures.
json analyze_operator(const SymMatrix& s, double tol)
{
    const auto sd = sym_eig(s);
    if (!(sd.min() > kFrameFloor * sd.max())) {
        std::ostringstream msg;
        msg << "not a frame: lower bound ≈ 0 (A = " << sd.min() << ")";
        throw DomainError(msg.str());
    }
    const double deviation = op_norm_diff(s, SymMatrix::identity(s.dim()));
    return {{"S", matrix_to_json(s.matrix())},
            {"eigenvalues", sd.eigenvalues},
            {"A", sd.min()},
            {"B", sd.max()},
            {"parseval", deviation <= tol},
            {"parseval_deviation", deviation},
            {"closest_parseval_distance", closest_parseval_distance(sd)}};
}

int cmd_analyze(const Global& g, const std::string& input, std::ostream& out)
{
    const auto doc = read_json(input);
    json result;
    if (is_measure_document(doc)) {
        const auto m = measure_from_json(doc);
        result = analyze_operator(second_moment(m), g.tol);
        result["kind"] = "measure";
        result["dim"] = m.dim();
        result["N"] = m.size();
    } else {
        const auto f = frame_from_json(doc);
        result = analyze_operator(frame_operator(f), g.tol);
        result["kind"] = "frame";
        result["dim"] = f.dim();
        result["N"] = f.size();
    }
    emit(g, out, "analyze", result, [&](std::ostream& os) {
        os << "quantity,value\n";
        for (const char* key : {"A", "B", "parseval_deviation", "closest_parseval_distance"})
            os << key << ',' << g17(result[key].get<double>()) << '\n';
        os << "parseval," << (result["parseval"].get<bool>() ? 1 : 0) << '\n';
    });
    return kExitOk;
}

int cmd_canonical(const Global& g, const std::string& input, const std::string& output, std::ostream& out)
{
    const auto doc = read_json(input);
    json written;
    SymMatrix s;
    std::vector<Vector> atoms;
    Vector weights;
    if (is_measure_document(doc)) {
        const auto m = push_forward_canonical(measure_from_json(doc));
        written = measure_to_json(m);
        s = second_moment(m);
        atoms = m.atoms();
        weights = m.weights();
    } else {
        const auto f = canonical_parseval(frame_from_json(doc));
        written = frame_to_json(f);
        s = frame_operator(f);
        atoms = f.vectors();
        weights = f.weights();
    }
    if (!output.empty())
        write_json(output, written);
    const auto sd = sym_eig(s);
    json result{{"output", output.empty() ? json() : json(output)},
                {"A", sd.min()},
                {"B", sd.max()},
                {"parseval_deviation", op_norm_diff(s, SymMatrix::identity(s.dim()))},
                {"canonical", written}};
    emit(g, out, "canonical", result, [&](std::ostream& os) { write_atoms_csv(os, atoms, weights); });
    return kExitOk;
}

int cmd_w2(const Global& g, const std::string& a, const std::string& b, const std::string& coupling, std::ostream& out)
{
    const auto m = measure_from_json(read_json(a));
    const auto n = measure_from_json(read_json(b));
    if (m.dim() != n.dim())
        throw InvalidInput("w2: dimensions differ (" + std::to_string(m.dim()) + " vs " + std::to_string(n.dim()) + ")");
    const auto r = w2_discrete(m, n);
    if (!coupling.empty()) {
        std::ofstream csv(coupling);
        if (!csv)
            throw InvalidInput("cannot write " + coupling);
        write_coupling_csv(csv, r.coupling);
    }
    auto result = transport_to_json(r);
    result["coupling"] = coupling.empty() ? json() : json(coupling);
    emit(g, out, "w2", result, [&](std::ostream& os) { write_coupling_csv(os, r.coupling); });
    return kExitOk;
}

int cmd_discretize(const Global& g, const std::string& input, double eps, std::size_t samples, bool centered,
                   const std::string& output, std::ostream& out)
{
    auto spec = spec_from_json(read_json(input));
    DiscretizeOptions opt;
    opt.samples = samples;
    opt.centered = centered;
    std::optional<std::uint64_t> seed = g.seed ? g.seed : spec.seed;
    if (spec.family() != Family::discrete) {
        if (!seed)
            throw InvalidInput("discretize: a seed is required (--seed or \"seed\" in the spec)");
        opt.seed = *seed;
    }
    const auto r = discretize(spec, eps, opt);
    const auto certificate = certificate_to_json(r);
    auto doc = measure_to_json(r.measure);
    doc["certificate"] = certificate;
    if (!output.empty())
        write_json(output, doc);

    Global shown = g;
    shown.seed = seed;
    json result{{"output", output.empty() ? json() : json(output)}, {"certificate", certificate}};
    if (output.empty())
        result["measure"] = measure_to_json(r.measure);
    emit(shown, out, "discretize", result,
         [&](std::ostream& os) { write_atoms_csv(os, r.measure.atoms(), r.measure.weights()); });
    return kExitOk;
}

VerificationReport run_suite(const VerifyArgs& v, std::uint64_t seed)
{
    const auto trials = [&](std::size_t fallback) { return v.trials.value_or(fallback); };
    if (v.suite == "finite-optimality") {
        OptimalityOptions opt;
        opt.competitors = v.competitors;
        opt.probes = v.probes;
        return verify_finite_optimality(frame_corpus(trials(200), seed), opt, seed);
    }
    if (v.suite == "w2-optimality")
        return verify_w2_optimality(measure_corpus(trials(50), seed), v.competitors, seed);
    if (v.suite == "distance-bound")
        return verify_distance_bound(measure_corpus(trials(50), seed));
    if (v.suite == "split")
        return verify_split_invariance(trials(500), seed);
    if (v.suite == "continuity-frames" || v.suite == "continuity-w2") {
        ContinuityOptions opt;
        opt.A = v.A;
        opt.B = v.B;
        opt.d = v.dim;
        opt.trials = trials(200);
        opt.seed = seed;
        return v.suite == "continuity-frames" ? continuity_modulus_frames(opt).report
                                              : continuity_modulus_w2(opt).report;
    }
    if (v.suite == "convergence") {
        if (v.spec.empty())
            throw InvalidInput("verify convergence: --spec is required");
        ConvergenceOptions opt;
        opt.discretize.samples = v.samples;
        opt.discretize.seed = seed;
        return convergence_study(spec_from_json(read_json(v.spec)), opt).report;
    }
    throw InvalidInput("unknown suite \"" + v.suite + "\"");
}

int cmd_verify(const Global& g, const VerifyArgs& v, std::ostream& out, std::ostream& err)
{
    if (std::find(kSuites.begin(), kSuites.end(), v.suite) == kSuites.end())
        throw InvalidInput("unknown suite \"" + v.suite + "\"");
    const auto seed = require_seed(g, "verify");
    const auto report = run_suite(v, seed);
    if (!v.csv.empty()) {
        std::ofstream csv(v.csv);
        if (!csv)
            throw InvalidInput("cannot write " + v.csv);
        write_trials_csv(csv, report);
    }
    emit(g, out, "verify", report_to_json(report), [&](std::ostream& os) { write_trials_csv(os, report); });
    if (report.pass())
        return kExitOk;
    err << "verify " << v.suite << ": " << report.violations << " violation(s)";
    if (!report.failures.empty())
        err << "; " << report.failures.front();
    err << '\n';
    return kExitVerificationFailed;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Frames, canonical Parseval maps and W2 certificates", "pframe"};
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    app.add_option("--seed", g.seed, "Seed for every randomized step");
    app.add_option("--tol", g.tol, "Tolerance for the Parseval flag")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", g.out, "Write the report here instead of stdout");

    std::string input, input_b, output, coupling;
    double eps = 0.0;
    std::size_t samples = 20000;
    bool centered = false;
    VerifyArgs v;

    auto* analyze = app.add_subcommand("analyze", "Frame operator, bounds and distance to the Parseval set");
    analyze->add_option("input", input, "Frame or measure JSON")->required();

    auto* canonical = app.add_subcommand("canonical", "Canonical Parseval frame or push-forward measure");
    canonical->add_option("input", input, "Frame or measure JSON")->required();
    canonical->add_option("-o,--output", output, "Write the canonical frame or measure here");

    auto* w2 = app.add_subcommand("w2", "Exact W2 between two discrete measures");
    w2->add_option("a", input, "Measure JSON")->required();
    w2->add_option("b", input_b, "Measure JSON")->required();
    w2->add_option("--coupling", coupling, "Write the optimal coupling as CSV");

    auto* disc = app.add_subcommand("discretize", "Finitely supported measure within eps in W2");
    disc->add_option("spec", input, "Measure spec JSON")->required();
    disc->add_option("--eps", eps, "Target accuracy")->required()->check(CLI::PositiveNumber);
    disc->add_option("--samples", samples, "Sample count for non-discrete specs")->check(CLI::PositiveNumber);
    disc->add_flag("--centered", centered, "Represent cubes by their centres");
    disc->add_option("-o,--output", output, "Write the measure and its certificate here");

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite", v.suite, "One of: finite-optimality, w2-optimality, distance-bound, "
                                         "continuity-frames, continuity-w2, convergence, split")
        ->required();
    verify->add_option("--trials", v.trials, "Instances (or trials per rung)");
    verify->add_option("--competitors", v.competitors, "Competitors per instance");
    verify->add_option("--probes", v.probes, "Tangent probes per frame");
    verify->add_option("--A", v.A, "Lower frame bound of the continuity window")->check(CLI::PositiveNumber);
    verify->add_option("--B", v.B, "Upper frame bound of the continuity window")->check(CLI::PositiveNumber);
    verify->add_option("--dim", v.dim, "Dimension for the continuity suites")->check(CLI::PositiveNumber);
    verify->add_option("--spec", v.spec, "Measure spec JSON for the convergence suite");
    verify->add_option("--samples", v.samples, "Sample count for the convergence suite")->check(CLI::PositiveNumber);
    verify->add_option("--csv", v.csv, "Also write the per-trial CSV here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze)
            return cmd_analyze(g, input, out);
        if (*canonical)
            return cmd_canonical(g, input, output, out);
        if (*w2)
            return cmd_w2(g, input, input_b, coupling, out);
        if (*disc)
            return cmd_discretize(g, input, eps, samples, centered, output, out);
        return cmd_verify(g, v, out, err);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitStage;
    }
}

} // namespace pframe
