#pragma once

#include "pframe/discrete_measure.hpp"
#include "pframe/frames.hpp"
#include "pframe/measures.hpp"
#include "pframe/transport.hpp"
#include "pframe/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace pframe {

inline constexpr const char* kToolVersion = "1.0.0";

/// Tolerance on |sum w - 1| when a measure file is read; weights are then
/// renormalized.
inline constexpr double kFileMassTolerance = 1e-9;

/// Parses a file; InvalidInput if it is missing or not JSON.
nlohmann::json read_json(const std::filesystem::path& path);
/// Writes with a trailing newline; InvalidInput if the file cannot be opened.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// {"dim", "vectors", "weights"}; weights are omitted when all are 1.
nlohmann::json frame_to_json(const FiniteFrame& f);
/// Weights default to 1. Schema errors raise InvalidInput.
FiniteFrame frame_from_json(const nlohmann::json& doc);

/// {"dim", "atoms", "weights"}.
nlohmann::json measure_to_json(const DiscreteMeasure& m);
/// Rejects |sum w - 1| > kFileMassTolerance. Extra keys are ignored.
DiscreteMeasure measure_from_json(const nlohmann::json& doc);

/// True for measure documents (an "atoms" key), false for frame documents.
bool is_measure_document(const nlohmann::json& doc);

/// {"dim", "family", ...}: gaussian takes "mean" and "covariance",
/// uniform_sphere and uniform_ball take "radius", discrete takes "atoms" and
/// "weights", mixture takes "components": [{"weight", "spec"}] where nested
/// specs inherit "dim". An optional "seed" is stored on the spec.
MeasureSpec spec_from_json(const nlohmann::json& doc);

nlohmann::json bounds_to_json(const FrameBounds& b);
nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json transport_to_json(const TransportResult& r);
/// Summary, parameters, failures and the per-trial records.
nlohmann::json report_to_json(const VerificationReport& r);
nlohmann::json certificate_to_json(const DiscretizeResult& r);

/// {"tool_version", "command", "seed", "result"}; a missing seed is null.
nlohmann::json envelope(const std::string& command, std::optional<std::uint64_t> seed, nlohmann::json result);

} // namespace pframe
