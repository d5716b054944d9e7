#include "dualot/trajectory.hpp"

#include <stdexcept>

#include "dualot/image_io.hpp"

namespace dualot {

std::string format_trajectory_row(const TrajectoryRow& row) {
  std::string out = std::to_string(row.iter);
  for (double v : {row.seconds, row.primal, row.dual, row.gap, row.col_infeas_l1, row.s}) {
    out += ',';
    out += format_double(v);
  }
  return out;
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << kTrajectoryHeader << '\n';
  out_.flush();
}

void TrajectoryWriter::append(const TrajectoryRow& row) {
  out_ << format_trajectory_row(row) << '\n';
  out_.flush();
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectoryRow>& rows) {
  TrajectoryWriter w(path);
  for (const auto& row : rows) w.append(row);
}

}  // namespace dualot
