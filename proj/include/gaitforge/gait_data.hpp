#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gaitforge::gait {

// Joint channel order used for every [3][n] angle block in the project.
enum JointIndex { kHip = 0, kKnee = 1, kAnkle = 2 };
constexpr int kNumJoints = 3;

using AngleGrid = Eigen::Matrix<double, 3, Eigen::Dynamic>;  // degrees, [joint][point]

struct GaitRow {
  std::string subject_id;
  double speed_mps = 0.0;
  long cycle_id = 0;
  double phase_or_time = 0.0;  // fraction 0..1 when phase-indexed, seconds otherwise
  double hip_deg = 0.0;
  double knee_deg = 0.0;
  double ankle_deg = 0.0;
};

struct GaitTable {
  std::vector<GaitRow> rows;
  bool time_indexed = false;  // column was "time" rather than "phase"
};

// One gait cycle resampled onto a uniform phase grid [0, 1), endpoint 0
// included, 1 excluded (the cycle wraps).
struct PhaseCycle {
  double speed_mps = 0.0;
  AngleGrid angles_deg;  // 3 x n_points
  std::optional<double> stride_duration_s;

  int n_points() const { return int(angles_deg.cols()); }
};

struct MeanGaitProfile {
  double speed_mps = 0.0;
  AngleGrid angles_deg;  // 3 x n_points, mean across cycles
  std::optional<double> stride_duration_s;

  int n_points() const { return int(angles_deg.cols()); }
};

struct MissingColumn : std::runtime_error {
  explicit MissingColumn(const std::string& name)
      : std::runtime_error("missing required CSV column: " + name), column(name) {}
  std::string column;
};

struct MalformedNumber : std::runtime_error {
  MalformedNumber(size_t row_, const std::string& column_, const std::string& cell_)
      : std::runtime_error("row " + std::to_string(row_) + ", column '" + column_ +
                           "': cannot parse '" + cell_ + "'"),
        row(row_), column(column_), cell(cell_) {}
  size_t row;  // 1-based data row index
  std::string column;
  std::string cell;
};

struct EmptyTable : std::runtime_error {
  EmptyTable() : std::runtime_error("CSV contains a header but no data rows") {}
};

struct TooFewSamples : std::runtime_error {
  TooFewSamples() : std::runtime_error("need at least 2 samples to resample a cycle") {}
};

struct MixedResolution : std::runtime_error {
  MixedResolution() : std::runtime_error("cycles disagree on n_points") {}
};

// Parses the gait kinematics CSV schema:
//   subject_id,speed,cycle_id,phase|time,hip_deg,knee_deg,ankle_deg
// Header row mandatory, comma separated, '.' decimal, LF or CRLF.
GaitTable parse_gait_csv(std::string_view bytes);

// Linear interpolation of one cycle onto a uniform n-point phase grid.
// Input phase (or elapsed time) must be monotone non-decreasing; its
// endpoints define phase 0 and 1.
PhaseCycle resample_phase(const std::vector<double>& phase, const AngleGrid& samples,
                          int n_points, double speed_mps,
                          std::optional<double> stride_duration_s = std::nullopt);

// Groups cycles whose speeds agree within group_tolerance and averages them
// pointwise. Output sorted ascending by speed.
std::vector<MeanGaitProfile> aggregate_mean(const std::vector<PhaseCycle>& cycles,
                                            double group_tolerance);

// Full ingestion: split table rows into (subject, cycle) groups, resample
// each to n_points and aggregate by speed.
std::vector<MeanGaitProfile> ingest_table(const GaitTable& table, int n_points,
                                          double group_tolerance);

}  // namespace gaitforge::gait
