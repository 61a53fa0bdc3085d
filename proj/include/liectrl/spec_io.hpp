#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "liectrl/catalog.hpp"
#include "liectrl/checker.hpp"
#include "liectrl/reach.hpp"
#include "liectrl/simulator.hpp"

namespace liectrl::io {

using Bundle = catalog::SystemBundle;

/// Parses a system document. Throws Error(ParseError) with a JSON-path hint
/// on malformed input; structural validations (Jacobi, Leibniz, bounds) are
/// run by the caller / CLI.
Bundle load_system(const nlohmann::json& doc);
Bundle load_system_file(const std::string& path);

/// Canonical document for a bundle (structure entries i<j, sorted).
nlohmann::json save_system(const Bundle& bundle);

/// FNV-1a 64-bit hex digest of the raw file bytes.
std::string file_digest(const std::string& path);

/// Report envelope shared by all commands.
nlohmann::json make_report(const std::string& command,
                           const std::string& input_digest,
                           nlohmann::json parameters, nlohmann::json results,
                           nlohmann::json tolerances);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const Subspace& s);
nlohmann::json to_json(const Spectrum& s);
nlohmann::json to_json(const DDecomposition& dec);
nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const G0StructureReport& rep);
nlohmann::json to_json(const AccessibilityResult& res);

/// Group element literal: "identity", {"exp": [coords]}, or
/// {"factors": [[x, y], [row-major matrix], ...]}.
GroupElement parse_element(const GroupRealization& r, const nlohmann::json& doc);
nlohmann::json element_to_json(const GroupRealization& r, const GroupElement& g);

/// Trajectory export. CSV columns: time, then per-factor coordinates in
/// factor order (translation: x0..; matrix: row-major m00, m01, ..).
void write_trajectory_csv(std::ostream& os, const GroupRealization& r,
                          const Trajectory& traj);
void write_trajectory_jsonl(std::ostream& os, const GroupRealization& r,
                            const Trajectory& traj);
/// Cloud export: one JSON record per endpoint with factors and log chart.
void write_cloud_jsonl(std::ostream& os, const GroupRealization& r,
                       const EndpointCloud& cloud);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace liectrl::io
