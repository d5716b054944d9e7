#include "dualot/cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "dualot/barycenter.hpp"
#include "dualot/image_io.hpp"
#include "dualot/oracle.hpp"
#include "dualot/rounding.hpp"
#include "dualot/sinkhorn.hpp"
#include "dualot/trajectory.hpp"

#ifndef DUALOT_VERSION
#define DUALOT_VERSION "unknown"
#endif

namespace dualot::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_pgm(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".pgm";
}

int metric_exponent(const std::string& metric) {
  if (metric == "l1") return 1;
  if (metric == "l2sq") return 2;
  if (metric == "l3") return 3;
  throw InputError("unknown metric '" + metric + "'");
}

Termination make_termination(const RunConfig& config) {
  Termination t;
  t.eps = config.termination.eps;
  t.max_iter = config.termination.max_iter;
  t.timeout_seconds = config.termination.timeout;
  t.log_stride = config.termination.log_stride;
  t.timing = config.termination.timing == "off" ? Timing::off : Timing::wall;
  t.workers = std::max(1u, config.workers);
  return t;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_manifest(const RunConfig& config, const fs::path& dir, unsigned workers, const Instance& inst,
                    const std::vector<std::string>& warnings) {
  json m;
  m["config"] = to_json(config);
  m["version"] = DUALOT_VERSION;
  m["workers"] = workers;
  m["n"] = inst.kernel.size();
  m["raw_cost_sup"] = inst.kernel.raw_sup();
  m["warnings"] = warnings;
  write_json(dir / "manifest.json", m);
}

unsigned effective_workers(const RunConfig& config, std::size_t n) {
  const unsigned w = std::max(1u, config.workers);
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(n, 1)));
}

double plan_cost(const DenseCoupling& plan, const CostKernel& kernel) {
  double cost = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    for (std::size_t j = 0; j < plan.cols(); ++j) cost += kernel(i, j) * plan(i, j);
  }
  return cost * kernel.raw_sup();
}

double min_mass(const Histogram& h) { return h.min(); }

void maybe_render(const RunConfig& config, const Instance& inst, const Histogram& h, const fs::path& path) {
  if (!config.render_pgm || inst.width == 0) return;
  write_pgm(path, histogram_to_image(h, inst.width, inst.height));
}

}  // namespace

Instance load_instance(const InstanceSpec& spec, std::size_t dense_cap) {
  if (spec.inputs.empty()) throw InputError("no input files given");
  std::vector<Histogram> hs;
  std::size_t width = spec.grid_width, height = spec.grid_height;
  for (const auto& path : spec.inputs) {
    try {
      if (is_pgm(path)) {
        const Image img = read_pgm(path);
        if (width == 0 && height == 0) {
          width = img.width;
          height = img.height;
        } else if (img.width != width || img.height != height) {
          throw InputError(path + ": image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                           ", expected " + std::to_string(width) + "x" + std::to_string(height));
        }
        hs.push_back(ingest_image_histogram(img, spec.perturbation));
      } else {
        hs.push_back(Histogram::normalized(read_values_csv(path)));
      }
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  const std::size_t n = hs.front().size();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (hs[k].size() != n) {
      throw InputError("marginal lengths differ: " + spec.inputs[k] + " has " + std::to_string(hs[k].size()) +
                       " entries, expected " + std::to_string(n));
    }
  }

  if (!spec.cost.empty()) {
    std::vector<std::vector<double>> rows;
    try {
      rows = read_table_csv(spec.cost);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    if (rows.size() != n) throw InputError("cost matrix must have " + std::to_string(n) + " rows");
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& row : rows) {
      if (row.size() != n) throw InputError("cost matrix must be square");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    try {
      return Instance{CostKernel::explicit_matrix(std::move(flat), n, dense_cap), std::move(hs), 0, 0};
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (width == 0 || height == 0) throw InputError("grid shape unknown: pass --grid WxH or PGM inputs");
  if (width * height != n) {
    throw InputError("grid " + std::to_string(width) + "x" + std::to_string(height) + " does not match " +
                     std::to_string(n) + " histogram entries");
  }
  return Instance{CostKernel::grid(width, height, metric_exponent(spec.metric)), std::move(hs), width, height};
}

DxgParams resolve_params(const ParamSpec& spec, std::size_t n, double eps, double min_c) {
  DxgParams p;
  const double eta = spec.eta.value_or(0.0);
  if (spec.scheme == "tuned") {
    p = params_tuned(eta);
  } else if (spec.scheme == "li") {
    p = params_li(n, eps);
  } else if (spec.scheme == "loose") {
    p = params_loose(n, eps, min_c);
  } else {
    throw InputError("unknown scheme '" + spec.scheme + "'");
  }
  if (spec.eta) p.eta = *spec.eta;
  if (spec.eta_mu) p.eta_mu = *spec.eta_mu;
  if (spec.tau_p) p.tau_p = *spec.tau_p;
  if (spec.tau_mu) p.tau_mu = *spec.tau_mu;
  if (spec.beta) p.beta = *spec.beta;
  if (spec.alpha) p.alpha = *spec.alpha;
  p.validate();
  return p;
}

int cmd_solve(const RunConfig& config) {
  const Instance inst = load_instance(config.instance, config.dense_cap);
  if (inst.marginals.size() != 2) throw InputError("solve needs exactly two inputs: source and target");
  const Histogram& r = inst.marginals[0];
  const Histogram& c = inst.marginals[1];
  const std::size_t n = inst.kernel.size();
  const fs::path dir(config.out);
  fs::create_directories(dir);
  const unsigned workers = effective_workers(config, n);
  write_manifest(config, dir, workers, inst, {});

  Termination term = make_termination(config);
  TrajectoryWriter writer(dir / "trajectory.csv");
  term.sink = writer.sink();
  const Stopwatch clock(term.timing);
  json summary;
  summary["solver"] = config.solver;
  summary["n"] = n;

  if (config.solver == "dxg") {
    const DxgParams params = resolve_params(config.params, n, config.termination.eps, min_mass(c));
    const DxgSolution sol = dxg_solve(inst.kernel, r, c, params, term, config.dense_cap);
    summary["converged"] = sol.converged;
    summary["iterations"] = sol.iterations;
    summary["best_iter"] = sol.best_iter;
    summary["primal"] = sol.primal;
    summary["dual"] = sol.dual;
    summary["gap"] = sol.gap;
    summary["col_infeas_l1"] = sol.col_infeas_l1;
    summary["params"] = {{"eta", params.eta},     {"eta_mu", params.eta_mu}, {"tau_p", params.tau_p},
                         {"tau_mu", params.tau_mu}, {"beta", params.beta},     {"alpha", params.alpha}};
    if (sol.rounded_plan) {
      summary["cost"] = sol.rounded_cost;
      write_matrix_csv(dir / "plan.csv", *sol.rounded_plan);
    } else {
      summary["cost"] = nullptr;
    }
  } else if (config.solver == "sinkhorn") {
    const double eta = config.params.eta.value_or(0.0);
    if (!(eta > 0.0)) throw InputError("sinkhorn needs --eta > 0");
    const auto res = sinkhorn_solve(inst.kernel, r, c, eta, config.termination.eps / 6.0,
                                    config.termination.max_iter, term);
    summary["converged"] = res.converged;
    summary["iterations"] = res.iterations;
    const TrajectoryRow& last = res.trajectory.back();
    summary["primal"] = last.primal;
    summary["dual"] = last.dual;
    summary["gap"] = last.gap;
    summary["col_infeas_l1"] = res.col_gap;
    if (n <= config.dense_cap) {
      const DenseCoupling plan = round_to_polytope(sinkhorn_plan(res.potentials, inst.kernel), r, c);
      summary["cost"] = plan_cost(plan, inst.kernel);
      write_matrix_csv(dir / "plan.csv", plan);
    } else {
      summary["cost"] = nullptr;
    }
  } else if (config.solver == "exact") {
    if (n > kOracleMaxSize) throw InputError("exact solver supports n <= " + std::to_string(kOracleMaxSize));
    const ExactSolution sol = exact_ot(inst.kernel, r, c);
    const double value = sol.value * inst.kernel.raw_sup();
    writer.append(TrajectoryRow{sol.pivots, clock.logged(), value, value, 0.0, 0.0, 1.0});
    summary["converged"] = true;
    summary["iterations"] = sol.pivots;
    summary["primal"] = value;
    summary["dual"] = value;
    summary["gap"] = 0.0;
    summary["col_infeas_l1"] = 0.0;
    summary["cost"] = value;
    write_matrix_csv(dir / "plan.csv", sol.plan);
  } else {
    throw InputError("solver '" + config.solver + "' is not available for solve");
  }
  summary["seconds"] = clock.logged();
  write_json(dir / "summary.json", summary);
  return kExitOk;
}

int cmd_barycenter(const RunConfig& config) {
  const Instance inst = load_instance(config.instance, config.dense_cap);
  const std::size_t m = inst.marginals.size();
  const std::size_t n = inst.kernel.size();
  std::vector<std::string> warnings;
  std::vector<double> weights = config.instance.weights;
  if (weights.empty()) weights.assign(m, 1.0 / static_cast<double>(m));
  if (weights.size() != m) throw InputError("one weight per marginal required");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw InputError("weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    warnings.push_back("weights summed to " + format_double(wsum) + " and were normalized");
    for (double& w : weights) w /= wsum;
  }
  const double eta = config.params.eta.value_or(0.0);
  if (!(eta > 0.0)) throw InputError("barycenters need --eta > 0");

  const std::string solver = config.solver == "dxg" ? "dxg-barycenter" : config.solver;
  const bool run_ibp = solver == "ibp" || solver == "both";
  const bool run_dxg = solver == "dxg-barycenter" || solver == "both";
  if (!run_ibp && !run_dxg) throw InputError("solver '" + config.solver + "' is not available for barycenter");

  const fs::path dir(config.out);
  fs::create_directories(dir);
  write_manifest(config, dir, effective_workers(config, n), inst, warnings);
  json summary;
  summary["solver"] = solver;
  summary["n"] = n;
  summary["marginals"] = m;
  std::optional<Histogram> ibp_r, dxg_r;

  if (run_ibp) {
    Termination term = make_termination(config);
    TrajectoryWriter writer(dir / "trajectory_ibp.csv");
    term.sink = writer.sink();
    const auto res = ibp_barycenter(inst.kernel, inst.marginals, weights, eta, config.termination.eps / 6.0,
                                    config.termination.max_iter, term);
    write_values_csv(dir / "barycenter_ibp.csv", res.barycenter.weights(), "mass");
    maybe_render(config, inst, res.barycenter, dir / "barycenter_ibp.pgm");
    summary["ibp"] = {{"converged", res.converged}, {"iterations", res.iterations}, {"col_infeas_l1", res.col_gap}};
    ibp_r = res.barycenter;
  }
  if (run_dxg) {
    double min_c = 1.0;
    for (const auto& h : inst.marginals) min_c = std::min(min_c, h.min());
    const DxgParams params = resolve_params(config.params, n, config.termination.eps, min_c);
    Termination term = make_termination(config);
    TrajectoryWriter writer(dir / "trajectory_dxg.csv");
    term.sink = writer.sink();
    const auto res = dxgb_solve(inst.kernel, inst.marginals, weights, params, term);
    write_values_csv(dir / "barycenter_dxg.csv", res.barycenter.weights(), "mass");
    maybe_render(config, inst, res.barycenter, dir / "barycenter_dxg.pgm");
    summary["dxg"] = {{"converged", res.converged},
                      {"iterations", res.iterations},
                      {"gap", res.gap},
                      {"col_infeas_l1", res.col_infeas_l1}};
    dxg_r = res.barycenter;
  }
  if (ibp_r && dxg_r) summary["l1_distance"] = l1_distance(ibp_r->weights(), dxg_r->weights());
  write_json(dir / "summary.json", summary);
  return kExitOk;
}

int cmd_downsample(const std::string& input, std::size_t factor, const std::string& output) {
  Image img;
  try {
    img = read_pgm(input);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  Image small;
  try {
    small = downsample(img, factor);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  write_pgm(output, small);
  return kExitOk;
}

int cmd_gen(const std::string& kind, std::size_t n, std::uint64_t seed, const std::string& out_dir) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n == 0 || side * side != n) throw InputError("n must be a perfect square");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sd = static_cast<double>(side);
  std::vector<std::pair<std::string, std::vector<double>>> images;

  auto pixel_loop = [&](auto&& f) {
    std::vector<double> px(n);
    for (std::size_t k = 0; k < n; ++k) {
      px[k] = f(static_cast<double>(k / side), static_cast<double>(k % side));
    }
    return px;
  };

  if (kind == "gaussian-mixture") {
    for (const char* name : {"source", "target"}) {
      struct Blob {
        double y, x, sigma, w;
      };
      std::vector<Blob> blobs(3);
      for (auto& b : blobs) {
        b.y = unit(rng) * sd;
        b.x = unit(rng) * sd;
        b.sigma = sd * (0.1 + 0.15 * unit(rng));
        b.w = 0.5 + 0.5 * unit(rng);
      }
      images.emplace_back(name, pixel_loop([&](double y, double x) {
                            double v = 0.0;
                            for (const auto& b : blobs) {
                              const double d2 = (y - b.y) * (y - b.y) + (x - b.x) * (x - b.x);
                              v += b.w * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
                            }
                            return v;
                          }));
    }
  } else if (kind == "shapes") {
    auto center = [&] { return std::floor(sd * (0.25 + 0.5 * unit(rng))); };
    auto extent = [&] { return std::max(1.0, std::floor(sd * (0.1 + 0.15 * unit(rng)))); };
    const double dy = center(), dx = center(), dr = extent();
    images.emplace_back("shape_0", pixel_loop([&](double y, double x) {
                          return (y - dy) * (y - dy) + (x - dx) * (x - dx) <= dr * dr ? 1.0 : 0.0;
                        }));
    const double sy = center(), sx = center(), sh = extent();
    images.emplace_back("shape_1", pixel_loop([&](double y, double x) {
                          return std::abs(y - sy) <= sh && std::abs(x - sx) <= sh ? 1.0 : 0.0;
                        }));
    const double ry = center(), rx = center(), outer = extent() + 1.0, inner = std::floor(outer / 2.0);
    images.emplace_back("shape_2", pixel_loop([&](double y, double x) {
                          const double d2 = (y - ry) * (y - ry) + (x - rx) * (x - rx);
                          return d2 <= outer * outer && d2 >= inner * inner ? 1.0 : 0.0;
                        }));
  } else if (kind == "checkerboard") {
    const std::size_t max_block = std::max<std::size_t>(1, side / 4);
    const std::size_t block = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(max_block)) % max_block;
    for (int phase : {0, 1}) {
      images.emplace_back(phase == 0 ? "source" : "target", pixel_loop([&](double y, double x) {
                            const auto cell = static_cast<std::size_t>(y) / block + static_cast<std::size_t>(x) / block;
                            return (cell + static_cast<std::size_t>(phase)) % 2 == 0 ? 1.0 : 0.0;
                          }));
    }
  } else {
    throw InputError("unknown kind '" + kind + "'; expected gaussian-mixture, shapes or checkerboard");
  }

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  json files = json::array();
  for (const auto& [name, px] : images) {
    const Histogram h = ingest_image_histogram(px, 1e-6);
    write_values_csv(dir / (name + ".csv"), h.weights(), "mass");
    Image img{side, side, 255, px};
    const double peak = *std::max_element(px.begin(), px.end());
    for (double& v : img.pixels) v = v / peak * 255.0;
    write_pgm(dir / (name + ".pgm"), img);
    files.push_back(name);
  }
  write_json(dir / "gen.json", {{"kind", kind}, {"n", n}, {"seed", seed}, {"grid", {side, side}}, {"files", files}});
  return kExitOk;
}

namespace {

// Flags shared by solve and barycenter. Values land in `staged`; only the
// flags actually given are copied over a --config file's values.
struct RunFlags {
  std::string config_path;
  RunConfig staged;
  std::string grid;
  double eta = 0, eta_mu = 0, tau_p = 0, tau_mu = 0, beta = 0, alpha = 0;
  double timeout = 0;
  bool no_pgm = false;
  CLI::Option *o_eta, *o_eta_mu, *o_tau_p, *o_tau_mu, *o_beta, *o_alpha, *o_timeout, *o_grid;

  void attach(CLI::App* app) {
    auto& s = staged;
    app->add_option("inputs", s.instance.inputs, "Histogram CSV or PGM files; may come from --config");
    app->add_option("--config", config_path, "Run config JSON; explicit flags override it");
    app->add_option("--solver", s.solver, "dxg, sinkhorn, exact | ibp, dxg-barycenter, both");
    app->add_option("--scheme", s.params.scheme, "tuned, li, loose");
    o_eta = app->add_option("--eta", eta, "Primal entropic weight (normalized cost units)");
    o_eta_mu = app->add_option("--eta-mu", eta_mu, "Dual entropic weight");
    o_tau_p = app->add_option("--tau-p", tau_p, "Primal stepsize");
    o_tau_mu = app->add_option("--tau-mu", tau_mu, "Dual stepsize");
    o_beta = app->add_option("--beta", beta, "Log-odds cap");
    o_alpha = app->add_option("--alpha", alpha, "Column perturbation");
    app->add_option("--eps", s.termination.eps, "Accuracy target");
    app->add_option("--max-iter", s.termination.max_iter, "Iteration limit");
    o_timeout = app->add_option("--timeout", timeout, "Time limit in seconds");
    app->add_option("--metric", s.instance.metric, "l1, l2sq, l3")->check(CLI::IsMember(std::vector<std::string>{"l1", "l2sq", "l3"}));
    o_grid = app->add_option("--grid", grid, "Grid shape WxH for CSV inputs");
    app->add_option("--cost", s.instance.cost, "Explicit cost matrix CSV");
    app->add_option("--perturbation", s.instance.perturbation, "Added to PGM pixels before normalizing");
    app->add_option("--weights", s.instance.weights, "Barycenter weights");
    app->add_option("--log-stride", s.termination.log_stride, "Iterations between logged rows");
    app->add_option("--timing", s.termination.timing, "wall or off")->check(CLI::IsMember(std::vector<std::string>{"wall", "off"}));
    app->add_option("--seed", s.seed, "Recorded in the manifest");
    app->add_option("--workers", s.workers, "Row workers");
    app->add_option("--dense-cap", s.dense_cap, "Largest n that is materialized and rounded");
    app->add_flag("--no-pgm", no_pgm, "Skip PGM renders");
    app->add_option("--out", s.out, "Output directory");
  }

  RunConfig resolve(CLI::App* app, const std::string& command) {
    RunConfig base = staged;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InputError("cannot open " + config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw InputError(config_path + ": " + e.what());
      }
      base = run_config_from_json(j);
      // Flags given on the command line win over the file.
      auto given = [&](const char* name) { return app->get_option(name)->count() > 0; };
      if (given("inputs")) base.instance.inputs = staged.instance.inputs;
      if (given("--solver")) base.solver = staged.solver;
      if (given("--scheme")) base.params.scheme = staged.params.scheme;
      if (given("--eps")) base.termination.eps = staged.termination.eps;
      if (given("--max-iter")) base.termination.max_iter = staged.termination.max_iter;
      if (given("--metric")) base.instance.metric = staged.instance.metric;
      if (given("--cost")) base.instance.cost = staged.instance.cost;
      if (given("--perturbation")) base.instance.perturbation = staged.instance.perturbation;
      if (given("--weights")) base.instance.weights = staged.instance.weights;
      if (given("--log-stride")) base.termination.log_stride = staged.termination.log_stride;
      if (given("--timing")) base.termination.timing = staged.termination.timing;
      if (given("--seed")) base.seed = staged.seed;
      if (given("--workers")) base.workers = staged.workers;
      if (given("--dense-cap")) base.dense_cap = staged.dense_cap;
      if (given("--out")) base.out = staged.out;
    }
    base.command = command;
    if (o_eta->count()) base.params.eta = eta;
    if (o_eta_mu->count()) base.params.eta_mu = eta_mu;
    if (o_tau_p->count()) base.params.tau_p = tau_p;
    if (o_tau_mu->count()) base.params.tau_mu = tau_mu;
    if (o_beta->count()) base.params.beta = beta;
    if (o_alpha->count()) base.params.alpha = alpha;
    if (o_timeout->count()) base.termination.timeout = timeout;
    if (no_pgm) base.render_pgm = false;
    if (o_grid->count()) {
      char x = 0;
      std::istringstream ss(grid);
      std::size_t w = 0, h = 0;
      if (!(ss >> w >> x >> h) || (x != 'x' && x != 'X') || w == 0 || h == 0) {
        throw InputError("--grid expects WxH, got '" + grid + "'");
      }
      base.instance.grid_width = w;
      base.instance.grid_height = h;
    }
    if (base.instance.inputs.empty()) throw InputError("no input histograms given");
    return run_config_from_json(to_json(base));  // validates enumerants
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Linear-memory optimal transport solvers"};
  app.require_subcommand(1);

  RunFlags solve_flags, bary_flags;
  bary_flags.staged.solver = "dxg-barycenter";
  auto* solve = app.add_subcommand("solve", "Transport between two histograms");
  solve_flags.attach(solve);
  auto* bary = app.add_subcommand("barycenter", "Fixed-support entropic barycenter");
  bary_flags.attach(bary);

  std::string ds_in, ds_out;
  std::size_t factor = 2;
  auto* ds = app.add_subcommand("downsample", "Block-mean downsampling of a PGM image");
  ds->add_option("input", ds_in, "Input PGM")->required();
  ds->add_option("--factor", factor, "Block size");
  ds->add_option("--out", ds_out, "Output PGM")->required();

  std::string kind, gen_out = "instances";
  std::size_t gen_n = 1024;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Synthetic grid instances");
  gen->add_option("kind", kind, "gaussian-mixture, shapes, checkerboard")->required();
  gen->add_option("--n", gen_n, "Number of pixels (perfect square)");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*solve) return cmd_solve(solve_flags.resolve(solve, "solve"));
    if (*bary) return cmd_barycenter(bary_flags.resolve(bary, "barycenter"));
    if (*ds) return cmd_downsample(ds_in, factor, ds_out);
    if (*gen) return cmd_gen(kind, gen_n, gen_seed, gen_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace dualot::cli
