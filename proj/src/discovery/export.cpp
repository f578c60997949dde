#include "hricausal/discovery/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hricausal/error.hpp"

namespace hricausal::discovery {

using nlohmann::json;

namespace {

template <typename T>
json tensor_to_json(const Tensor3<T>& t) {
  json lags = json::array();
  for (std::size_t l = 0; l < t.n_lags(); ++l) {
    json sources = json::array();
    for (std::size_t i = 0; i < t.n_vars(); ++i) {
      json targets = json::array();
      for (std::size_t j = 0; j < t.n_vars(); ++j) targets.push_back(t(l, i, j));
      sources.push_back(std::move(targets));
    }
    lags.push_back(std::move(sources));
  }
  return lags;
}

template <typename T>
Tensor3<T> tensor_from_json(const json& doc, std::size_t n_lags, std::size_t n_vars,
                            const char* name) {
  Tensor3<T> t(n_lags, n_vars);
  if (!doc.is_array() || doc.size() != n_lags) {
    throw ParseError(std::string("tensor '") + name + "' has the wrong number of lags");
  }
  for (std::size_t l = 0; l < n_lags; ++l) {
    if (!doc[l].is_array() || doc[l].size() != n_vars) {
      throw ParseError(std::string("tensor '") + name + "' has the wrong number of sources");
    }
    for (std::size_t i = 0; i < n_vars; ++i) {
      if (!doc[l][i].is_array() || doc[l][i].size() != n_vars) {
        throw ParseError(std::string("tensor '") + name + "' has the wrong number of targets");
      }
      for (std::size_t j = 0; j < n_vars; ++j) t(l, i, j) = doc[l][i][j].get<T>();
    }
  }
  return t;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json params_to_json(const DiscoveryParams& p) {
  json doc;
  doc["alpha"] = p.alpha;
  doc["tau_min"] = p.tau_min;
  doc["tau_max"] = p.tau_max;
  doc["ci_test"] = std::string(stats::to_string(p.ci_test));
  doc["max_conditions"] = p.max_conditions;
  doc["pc_alpha"] = p.pc_alpha ? json(*p.pc_alpha) : json(nullptr);
  doc["seed"] = p.seed;
  doc["kernel"] = {{"ridge", p.kernel.ridge}, {"permutations", p.kernel.permutations}};
  return doc;
}

DiscoveryParams params_from_json(const json& doc, DiscoveryParams p) {
  if (!doc.is_object()) throw ParseError("discovery parameters must be an object");
  try {
    if (doc.contains("alpha")) p.alpha = doc.at("alpha").get<double>();
    if (doc.contains("tau_min")) p.tau_min = doc.at("tau_min").get<int>();
    if (doc.contains("tau_max")) p.tau_max = doc.at("tau_max").get<int>();
    if (doc.contains("ci_test")) p.ci_test = stats::parse_ci_test(doc.at("ci_test").get<std::string>());
    if (doc.contains("max_conditions")) p.max_conditions = doc.at("max_conditions").get<int>();
    if (doc.contains("pc_alpha") && !doc.at("pc_alpha").is_null()) {
      p.pc_alpha = doc.at("pc_alpha").get<double>();
    }
    if (doc.contains("seed")) p.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("kernel")) {
      const auto& k = doc.at("kernel");
      if (k.contains("ridge")) p.kernel.ridge = k.at("ridge").get<double>();
      if (k.contains("permutations")) p.kernel.permutations = k.at("permutations").get<int>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("discovery parameters: ") + e.what());
  }
  return p;
}

json model_to_json(const CausalModel& m) {
  json doc;
  doc["variables"] = m.variable_names;
  doc["tau_min"] = m.tau_min;
  doc["tau_max"] = m.tau_max;
  doc["structure"] = tensor_to_json(m.causal_structure);
  doc["val"] = tensor_to_json(m.val_matrix);
  doc["pval"] = tensor_to_json(m.pval_matrix);
  json params = params_to_json(m.params_used);
  params["method"] = std::string(to_string(m.method));
  if (m.te_params) {
    params["te"] = {{"history", m.te_params->history},
                    {"bins", m.te_params->bins},
                    {"shuffles", m.te_params->shuffles},
                    {"quantile", m.te_params->quantile}};
    json filter = json::array();
    for (const auto& d : m.te_filter) {
      filter.push_back({{"source", d.source},
                        {"target", d.target},
                        {"te", d.te},
                        {"threshold", d.threshold},
                        {"kept", d.kept}});
    }
    params["te_filter"] = std::move(filter);
  }
  doc["params"] = std::move(params);
  doc["batch_id"] = m.batch_id;
  return doc;
}

CausalModel model_from_json(const json& doc) {
  CausalModel m;
  try {
    m.variable_names = doc.at("variables").get<std::vector<std::string>>();
    m.tau_min = doc.at("tau_min").get<int>();
    m.tau_max = doc.at("tau_max").get<int>();
    if (m.tau_min < 1 || m.tau_max < m.tau_min) throw ParseError("invalid lag range");
    const auto lags = m.n_lags();
    const auto vars = m.n_vars();
    m.causal_structure = tensor_from_json<int>(doc.at("structure"), lags, vars, "structure");
    for (int s : m.causal_structure.data()) {
      if (s != 0 && s != 1) throw ParseError("structure entries must be 0 or 1");
    }
    m.val_matrix = tensor_from_json<double>(doc.at("val"), lags, vars, "val");
    m.pval_matrix = tensor_from_json<double>(doc.at("pval"), lags, vars, "pval");
    const auto& params = doc.at("params");
    m.params_used = params_from_json(params);
    m.method = parse_method(params.value("method", std::string("pcmci")));
    if (params.contains("te")) {
      const auto& te = params.at("te");
      stats::TEParams tp;
      tp.history = te.at("history").get<int>();
      tp.bins = te.at("bins").get<int>();
      tp.shuffles = te.at("shuffles").get<int>();
      tp.quantile = te.at("quantile").get<double>();
      m.te_params = tp;
    }
    if (params.contains("te_filter")) {
      for (const auto& d : params.at("te_filter")) {
        m.te_filter.push_back({d.at("source").get<std::size_t>(), d.at("target").get<std::size_t>(),
                               d.at("te").get<double>(), d.at("threshold").get<double>(),
                               d.at("kept").get<bool>()});
      }
    }
    m.batch_id = doc.at("batch_id").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("causal model: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(std::string("causal model: ") + e.what());
  }
  return m;
}

double dot_pen_width(double val) { return 10.0 * std::abs(val); }

std::string model_to_dot(const CausalModel& m) {
  std::ostringstream out;
  out << "digraph causal_model {\n";
  out << "  rankdir=LR;\n";
  for (const auto& name : m.variable_names) out << "  " << quoted(name) << ";\n";
  for (const auto& e : edges_of(m)) {
    const auto l = static_cast<std::size_t>(e.lag - m.tau_min);
    const double val = m.val_matrix(l, e.source, e.target);
    char attrs[160];
    std::snprintf(attrs, sizeof attrs, " [label=\"\xCF\x84=%d\", penwidth=%.6f];\n",
                  e.lag, dot_pen_width(val));
    out << "  " << quoted(m.variable_names[e.source]) << " -> "
        << quoted(m.variable_names[e.target]) << attrs;
  }
  out << "}\n";
  return out.str();
}

std::string render_model(const CausalModel& model, ExportFormat format) {
  if (format == ExportFormat::Dot) return model_to_dot(model);
  return model_to_json(model).dump(2) + "\n";
}

void export_model(const CausalModel& model, ExportFormat format, const std::filesystem::path& path) {
  const std::string text = render_model(model, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

CausalModel import_model_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace hricausal::discovery
