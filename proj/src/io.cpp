#include "pframe/io.hpp"

#include "pframe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace pframe {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* key)
{
    if (!doc.is_object())
        throw InvalidInput("schema: expected a JSON object");
    const auto it = doc.find(key);
    if (it == doc.end())
        throw InvalidInput(std::string("schema: missing \"") + key + "\"");
    return *it;
}

std::size_t dim_of(const json& doc)
{
    const auto& d = field(doc, "dim");
    if (!d.is_number_integer() || d.get<long long>() <= 0)
        throw InvalidInput("schema: \"dim\" must be a positive integer");
    return d.get<std::size_t>();
}

double number(const json& v, const char* what)
{
    if (!v.is_number())
        throw InvalidInput(std::string("schema: ") + what + " must be a number");
    return v.get<double>();
}

Vector numbers(const json& v, const char* what)
{
    if (!v.is_array())
        throw InvalidInput(std::string("schema: ") + what + " must be an array of numbers");
    Vector out;
    out.reserve(v.size());
    for (const auto& x : v)
        out.push_back(number(x, what));
    return out;
}

std::vector<Vector> rows(const json& v, const char* what)
{
    if (!v.is_array())
        throw InvalidInput(std::string("schema: ") + what + " must be an array of arrays");
    std::vector<Vector> out;
    out.reserve(v.size());
    for (const auto& r : v)
        out.push_back(numbers(r, what));
    return out;
}

DiscreteMeasure measure_from_parts(std::size_t dim, std::vector<Vector> atoms, Vector weights)
{
    const double s = std::accumulate(weights.begin(), weights.end(), 0.0);
    // leave exact files untouched so that write-then-read is bitwise
    if (std::abs(s - 1.0) <= 1e-13)
        return DiscreteMeasure(dim, std::move(atoms), std::move(weights));
    return DiscreteMeasure::normalized(dim, std::move(atoms), std::move(weights), kFileMassTolerance);
}

MeasureSpec spec_with_dim(const json& doc, std::optional<std::size_t> inherited)
{
    const std::size_t d = doc.is_object() && doc.contains("dim") ? dim_of(doc)
                          : inherited                           ? *inherited
                                                                : dim_of(doc);
    const auto& fam = field(doc, "family");
    if (!fam.is_string())
        throw InvalidInput("schema: \"family\" must be a string");
    const auto family = fam.get<std::string>();

    if (family == "gaussian") {
        Vector mean = doc.contains("mean") ? numbers(doc["mean"], "\"mean\"") : Vector(d, 0.0);
        const Matrix cov = doc.contains("covariance") ? Matrix::from_rows(rows(doc["covariance"], "\"covariance\""))
                                                      : Matrix::identity(d);
        if (mean.size() != d)
            throw InvalidInput("schema: \"mean\" must have length dim");
        return MeasureSpec::gaussian(std::move(mean), SymMatrix(cov));
    }
    if (family == "uniform_sphere")
        return MeasureSpec::uniform_sphere(d, number(field(doc, "radius"), "\"radius\""));
    if (family == "uniform_ball")
        return MeasureSpec::uniform_ball(d, number(field(doc, "radius"), "\"radius\""));
    if (family == "discrete")
        return MeasureSpec::discrete(measure_from_parts(d, rows(field(doc, "atoms"), "\"atoms\""),
                                                        numbers(field(doc, "weights"), "\"weights\"")));
    if (family == "mixture") {
        const auto& comps = field(doc, "components");
        if (!comps.is_array())
            throw InvalidInput("schema: \"components\" must be an array");
        std::vector<MeasureSpec::Component> parts;
        for (const auto& c : comps)
            parts.push_back({number(field(c, "weight"), "component weight"), spec_with_dim(field(c, "spec"), d)});
        auto m = MeasureSpec::mixture(std::move(parts));
        if (m.dim() != d)
            throw InvalidInput("schema: mixture components do not match \"dim\"");
        return m;
    }
    throw InvalidInput("schema: unknown family \"" + family + "\"");
}

} // namespace

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidInput("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

json frame_to_json(const FiniteFrame& f)
{
    json doc{{"dim", f.dim()}, {"vectors", f.vectors()}};
    const auto& w = f.weights();
    if (std::any_of(w.begin(), w.end(), [](double x) { return x != 1.0; }))
        doc["weights"] = w;
    return doc;
}

FiniteFrame frame_from_json(const json& doc)
{
    const std::size_t d = dim_of(doc);
    auto vectors = rows(field(doc, "vectors"), "\"vectors\"");
    if (doc.contains("weights"))
        return FiniteFrame(d, std::move(vectors), numbers(doc["weights"], "\"weights\""));
    return FiniteFrame(d, std::move(vectors));
}

json measure_to_json(const DiscreteMeasure& m)
{
    return {{"dim", m.dim()}, {"atoms", m.atoms()}, {"weights", m.weights()}};
}

DiscreteMeasure measure_from_json(const json& doc)
{
    const std::size_t d = dim_of(doc);
    return measure_from_parts(d, rows(field(doc, "atoms"), "\"atoms\""), numbers(field(doc, "weights"), "\"weights\""));
}

bool is_measure_document(const json& doc)
{
    return doc.is_object() && doc.contains("atoms");
}

MeasureSpec spec_from_json(const json& doc)
{
    auto spec = spec_with_dim(doc, std::nullopt);
    if (doc.contains("seed")) {
        const auto& s = doc["seed"];
        if (!s.is_number_unsigned())
            throw InvalidInput("schema: \"seed\" must be a non-negative integer");
        spec.seed = s.get<std::uint64_t>();
    }
    return spec;
}

json bounds_to_json(const FrameBounds& b)
{
    return {{"A", b.lower}, {"B", b.upper}};
}

json matrix_to_json(const Matrix& m)
{
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        out.push_back(Vector(m.row(i).begin(), m.row(i).end()));
    return out;
}

json transport_to_json(const TransportResult& r)
{
    return {{"cost", r.cost},
            {"cost_squared", r.cost_squared},
            {"iterations", r.iterations},
            {"degenerate_pivots", r.degenerate_pivots},
            {"coupling_entries", r.coupling.entries.size()}};
}

json report_to_json(const VerificationReport& r)
{
    json trials = json::array();
    for (const auto& t : r.records)
        trials.push_back({{"trial", t.trial},
                          {"eps", t.eps},
                          {"delta_observed", t.delta_observed},
                          {"A", t.A},
                          {"B", t.B},
                          {"d", t.d},
                          {"N", t.N},
                          {"violation_margin", std::isfinite(t.violation_margin) ? json(t.violation_margin) : json()}});
    return {{"suite", r.suite},
            {"pass", r.pass()},
            {"trials", r.trials},
            {"violations", r.violations},
            {"worst_margin", std::isfinite(r.worst_margin) ? json(r.worst_margin) : json()},
            {"push_forwards", r.push_forwards},
            {"max_parseval_deviation", r.max_parseval_deviation},
            {"failures", r.failures},
            {"parameters", r.parameters},
            {"summary", r.summary},
            {"records", trials}};
}

json certificate_to_json(const DiscretizeResult& r)
{
    return {{"eps", r.eps},
            {"w2_bound", r.w2_bound},
            {"w2_bound_a_priori", r.w2_bound_a_priori},
            {"A_in", r.bounds_in.lower},
            {"B_in", r.bounds_in.upper},
            {"A_prime", r.bounds_out.lower},
            {"B_prime", r.bounds_out.upper},
            {"lower_ok", r.lower_ok()},
            {"upper_ok", r.upper_ok()},
            {"w2_ok", r.w2_ok()},
            {"sampled", r.sampled},
            {"exact_cells", r.exact_cells},
            {"truncation_radius", r.truncation.radius},
            {"tail", r.truncation.tail},
            {"grid_level", r.grid.level},
            {"cell", r.grid.cell()},
            {"d_n", r.grid.diameter()},
            {"quantization_cost", r.quantization_cost},
            {"operator_deviation", r.operator_deviation},
            {"operator_bound", r.grid.operator_bound()},
            {"atoms", r.measure.size()}};
}

json envelope(const std::string& command, std::optional<std::uint64_t> seed, json result)
{
    return {{"tool_version", kToolVersion},
            {"command", command},
            {"seed", seed ? json(*seed) : json()},
            {"result", std::move(result)}};
}

} // namespace pframe
