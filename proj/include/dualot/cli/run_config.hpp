#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dualot::cli {

/// Instance description: input files and how to build the cost.
struct InstanceSpec {
  std::vector<std::string> inputs;  // PGM or histogram CSV, in order
  std::string cost;                 // explicit cost matrix CSV; overrides the metric
  std::string metric = "l2sq";      // l1, l2sq, l3
  std::size_t grid_width = 0;       // 0: taken from the PGM inputs
  std::size_t grid_height = 0;
  double perturbation = 1e-6;
  std::vector<double> weights;  // barycenter weights; empty means uniform
};

/// Parameter scheme plus per-field overrides.
struct ParamSpec {
  std::string scheme = "tuned";  // tuned, li, loose
  std::optional<double> eta, eta_mu, tau_p, tau_mu, beta, alpha;
};

struct TerminationSpec {
  double eps = 1e-10;
  std::size_t max_iter = 1000000;
  double timeout = std::numeric_limits<double>::infinity();  // seconds
  std::size_t log_stride = 25;
  std::string timing = "wall";  // wall, off
};

struct RunConfig {
  std::string command = "solve";
  std::string solver = "dxg";  // dxg, sinkhorn, ibp, dxg-barycenter, exact, both
  InstanceSpec instance;
  ParamSpec params;
  TerminationSpec termination;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t dense_cap = 4096;
  bool render_pgm = true;
  std::string out = "out";
};

nlohmann::json to_json(const RunConfig& config);
/// Throws std::invalid_argument on unknown enumerants or malformed fields.
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace dualot::cli
