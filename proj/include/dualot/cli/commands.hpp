#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualot/cli/run_config.hpp"
#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"
#include "dualot/dxg.hpp"

namespace dualot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitInternal = 3;

/// Raised for unreadable or inconsistent instances; maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Instance {
  CostKernel kernel;
  std::vector<Histogram> marginals;
  std::size_t width = 0;  // grid shape, 0 when the cost is explicit
  std::size_t height = 0;
};

/// PGM inputs get the configured perturbation; CSV histograms are only
/// renormalized.
Instance load_instance(const InstanceSpec& spec, std::size_t dense_cap);

/// Scheme defaults with the config's overrides applied. `min_c` is the
/// smallest target mass, used by the loose scheme.
DxgParams resolve_params(const ParamSpec& spec, std::size_t n, double eps, double min_c);

/// Each command throws on failure; run_cli maps exceptions to exit codes.
int cmd_solve(const RunConfig& config);
int cmd_barycenter(const RunConfig& config);
int cmd_downsample(const std::string& input, std::size_t factor, const std::string& output);
int cmd_gen(const std::string& kind, std::size_t n, std::uint64_t seed, const std::string& out_dir);

/// Parses argv, dispatches, and returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace dualot::cli
