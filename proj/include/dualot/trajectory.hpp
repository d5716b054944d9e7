#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace dualot {

/// One logged solver state. Objectives are in the caller's original cost
/// units (rescaled by the kernel's raw sup-norm).
struct TrajectoryRow {
  std::size_t iter = 0;
  double seconds = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double col_infeas_l1 = 0.0;
  double s = 0.0;
};

inline constexpr const char* kTrajectoryHeader = "iter,seconds,primal,dual,gap,col_infeas_l1,s";

std::string format_trajectory_row(const TrajectoryRow& row);

/// Wall-clock timing for logs. `off` reports zero seconds so that repeated
/// runs write byte-identical trajectories.
enum class Timing { wall, off };

class Stopwatch {
 public:
  explicit Stopwatch(Timing mode = Timing::wall)
      : mode_(mode), start_(std::chrono::steady_clock::now()) {}
  /// Elapsed seconds for limits; always measured.
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  /// Elapsed seconds as written to logs.
  double logged() const { return mode_ == Timing::wall ? elapsed() : 0.0; }

 private:
  Timing mode_;
  std::chrono::steady_clock::time_point start_;
};

using TrajectorySink = std::function<void(const TrajectoryRow&)>;

/// Stopping rule and logging shared by the iterative solvers.
struct Termination {
  double eps = 1e-10;
  std::size_t max_iter = 1000000;
  double timeout_seconds = std::numeric_limits<double>::infinity();
  std::size_t log_stride = 25;
  Timing timing = Timing::wall;
  unsigned workers = 1;
  TrajectorySink sink;  // called for every logged row, in order
};

/// Appends rows to a CSV file, flushing after each one.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::filesystem::path& path);
  void append(const TrajectoryRow& row);
  TrajectorySink sink() {
    return [this](const TrajectoryRow& row) { append(row); };
  }

 private:
  std::ofstream out_;
};

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectoryRow>& rows);

}  // namespace dualot
