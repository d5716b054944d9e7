#include "dualot/cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dualot::cli {
namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

void require_one_of(const std::string& value, std::initializer_list<const char*> allowed, const char* field) {
  if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return value == a; })) {
    throw std::invalid_argument(std::string("unknown ") + field + " '" + value + "'");
  }
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["solver"] = c.solver;
  j["instance"] = {
      {"inputs", c.instance.inputs},
      {"cost", c.instance.cost},
      {"metric", c.instance.metric},
      {"grid_width", c.instance.grid_width},
      {"grid_height", c.instance.grid_height},
      {"perturbation", c.instance.perturbation},
      {"weights", c.instance.weights},
  };
  j["params"] = {
      {"scheme", c.params.scheme},       {"eta", optional_number(c.params.eta)},
      {"eta_mu", optional_number(c.params.eta_mu)}, {"tau_p", optional_number(c.params.tau_p)},
      {"tau_mu", optional_number(c.params.tau_mu)}, {"beta", optional_number(c.params.beta)},
      {"alpha", optional_number(c.params.alpha)},
  };
  // JSON has no infinity; a missing timeout is written as null.
  j["termination"] = {
      {"eps", c.termination.eps},
      {"max_iter", c.termination.max_iter},
      {"timeout", std::isfinite(c.termination.timeout) ? json(c.termination.timeout) : json(nullptr)},
      {"log_stride", c.termination.log_stride},
      {"timing", c.termination.timing},
  };
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["dense_cap"] = c.dense_cap;
  j["render_pgm"] = c.render_pgm;
  j["out"] = c.out;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  try {
    RunConfig c;
    c.command = j.value("command", c.command);
    c.solver = j.value("solver", c.solver);
    if (j.contains("instance")) {
      const json& in = j.at("instance");
      c.instance.inputs = in.value("inputs", c.instance.inputs);
      c.instance.cost = in.value("cost", c.instance.cost);
      c.instance.metric = in.value("metric", c.instance.metric);
      c.instance.grid_width = in.value("grid_width", c.instance.grid_width);
      c.instance.grid_height = in.value("grid_height", c.instance.grid_height);
      c.instance.perturbation = in.value("perturbation", c.instance.perturbation);
      c.instance.weights = in.value("weights", c.instance.weights);
    }
    if (j.contains("params")) {
      const json& p = j.at("params");
      c.params.scheme = p.value("scheme", c.params.scheme);
      c.params.eta = read_optional(p, "eta");
      c.params.eta_mu = read_optional(p, "eta_mu");
      c.params.tau_p = read_optional(p, "tau_p");
      c.params.tau_mu = read_optional(p, "tau_mu");
      c.params.beta = read_optional(p, "beta");
      c.params.alpha = read_optional(p, "alpha");
    }
    if (j.contains("termination")) {
      const json& t = j.at("termination");
      c.termination.eps = t.value("eps", c.termination.eps);
      c.termination.max_iter = t.value("max_iter", c.termination.max_iter);
      if (const auto timeout = read_optional(t, "timeout")) c.termination.timeout = *timeout;
      c.termination.log_stride = t.value("log_stride", c.termination.log_stride);
      c.termination.timing = t.value("timing", c.termination.timing);
    }
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.dense_cap = j.value("dense_cap", c.dense_cap);
    c.render_pgm = j.value("render_pgm", c.render_pgm);
    c.out = j.value("out", c.out);

    require_one_of(c.command, {"solve", "barycenter"}, "command");
    require_one_of(c.solver, {"dxg", "sinkhorn", "ibp", "dxg-barycenter", "exact", "both"}, "solver");
    require_one_of(c.params.scheme, {"tuned", "li", "loose"}, "scheme");
    require_one_of(c.instance.metric, {"l1", "l2sq", "l3"}, "metric");
    require_one_of(c.termination.timing, {"wall", "off"}, "timing");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed run config: ") + e.what());
  }
}

}  // namespace dualot::cli
