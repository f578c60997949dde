#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "hricausal/causal_model.hpp"

namespace hricausal::discovery {

enum class ExportFormat { Json, Dot };

/// JSON document with tensors indexed [lag][source][target]:
/// { "variables", "tau_min", "tau_max", "structure", "val", "pval", "params", "batch_id" }.
nlohmann::json model_to_json(const CausalModel& model);
/// Inverse of model_to_json. Throws ParseError on schema violations.
CausalModel model_from_json(const nlohmann::json& doc);

nlohmann::json params_to_json(const DiscoveryParams& params);
DiscoveryParams params_from_json(const nlohmann::json& doc, DiscoveryParams base = {});

/// Graphviz digraph: every variable as a node, one edge per present link,
/// labeled with its lag; pen width proportional to |val|.
std::string model_to_dot(const CausalModel& model);

/// Pen width used for a link of strength `val`.
double dot_pen_width(double val);

/// Serialized text of the model in the given format (JSON is pretty-printed
/// with 2-space indentation and a trailing newline).
std::string render_model(const CausalModel& model, ExportFormat format);

void export_model(const CausalModel& model, ExportFormat format, const std::filesystem::path& path);

CausalModel import_model_json(const std::filesystem::path& path);

}  // namespace hricausal::discovery
