#pragma once

#include "core/regularity.hpp"
#include "core/solver.hpp"
#include "core/verifier.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace facetflow {

using json = nlohmann::ordered_json;

json to_json(const ModelParams& mp);
ModelParams params_from_json(const json& j);

json to_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const json& j);

json to_json(const SweepReport& report);
json to_json(const SolveReport& report);
json to_json(const LadderReport& report);
json to_json(const HolderFit& fit);
json to_json(const MeshSpec& spec);
MeshSpec mesh_spec_from_json(const json& j);
json to_json(const ToleranceSpec& tol);
ToleranceSpec tolerance_from_json(const json& j);
json to_json(const RegularityReport& report);

// Full round-trip double formatting (17 significant digits).
std::string format_double(double x);

json load_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// FNV-1a digest of the canonical dump, used as the manifest's config hash.
std::string config_hash(const json& j);

std::string utc_timestamp();

// CSV with full-precision numeric cells (kept byte-stable for determinism
// checks).
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header = nullptr);

void write_mesh_csv(const std::filesystem::path& dir, const Mesh& mesh);
void write_field_csv(const std::filesystem::path& dir, const DiscreteField& field);

Mesh read_mesh_csv(const std::filesystem::path& dir);
DiscreteField read_field_csv(const std::filesystem::path& dir, std::shared_ptr<const Mesh> mesh);

}  // namespace facetflow
