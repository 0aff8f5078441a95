#include "gaitforge/gait_data.hpp"
#include <tuple>

#include <algorithm>
#include <cmath>
#include <map>

#include "gaitforge/csv.hpp"

namespace gaitforge::gait {

namespace {

int find_column(const std::vector<std::string>& header, const std::string& name) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return int(i);
  }
  return -1;
}

double parse_cell(const std::vector<std::string>& cells, int col, size_t data_row,
                  const std::string& column_name) {
  double v = 0.0;
  if (col >= int(cells.size()) || !csv::parse_double(cells[col], v) || !std::isfinite(v)) {
    std::string cell = col < int(cells.size()) ? cells[col] : std::string();
    throw MalformedNumber(data_row, column_name, cell);
  }
  return v;
}

}  // namespace

GaitTable parse_gait_csv(std::string_view bytes) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= bytes.size()) {
    size_t pos = bytes.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < bytes.size()) lines.push_back(bytes.substr(start));
      break;
    }
    lines.push_back(bytes.substr(start, pos - start));
    start = pos + 1;
  }
  if (lines.empty()) throw EmptyTable();

  auto header = csv::split_line(lines[0]);
  const int c_subject = find_column(header, "subject_id");
  const int c_speed = find_column(header, "speed");
  const int c_cycle = find_column(header, "cycle_id");
  int c_phase = find_column(header, "phase");
  bool time_indexed = false;
  if (c_phase < 0) {
    c_phase = find_column(header, "time");
    time_indexed = c_phase >= 0;
  }
  const int c_hip = find_column(header, "hip_deg");
  const int c_knee = find_column(header, "knee_deg");
  const int c_ankle = find_column(header, "ankle_deg");

  if (c_subject < 0) throw MissingColumn("subject_id");
  if (c_speed < 0) throw MissingColumn("speed");
  if (c_cycle < 0) throw MissingColumn("cycle_id");
  if (c_phase < 0) throw MissingColumn("phase (or time)");
  if (c_hip < 0) throw MissingColumn("hip_deg");
  if (c_knee < 0) throw MissingColumn("knee_deg");
  if (c_ankle < 0) throw MissingColumn("ankle_deg");

  GaitTable table;
  table.time_indexed = time_indexed;
  size_t data_row = 0;
  for (size_t li = 1; li < lines.size(); ++li) {
    std::string_view raw = lines[li];
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (raw.empty()) continue;
    ++data_row;
    auto cells = csv::split_line(raw);

    GaitRow row;
    row.subject_id = c_subject < int(cells.size()) ? cells[c_subject] : std::string();
    row.speed_mps = parse_cell(cells, c_speed, data_row, "speed");
    double cycle = parse_cell(cells, c_cycle, data_row, "cycle_id");
    row.cycle_id = long(std::llround(cycle));
    row.phase_or_time = parse_cell(cells, c_phase, data_row, time_indexed ? "time" : "phase");
    row.hip_deg = parse_cell(cells, c_hip, data_row, "hip_deg");
    row.knee_deg = parse_cell(cells, c_knee, data_row, "knee_deg");
    row.ankle_deg = parse_cell(cells, c_ankle, data_row, "ankle_deg");
    if (row.speed_mps <= 0.0) throw MalformedNumber(data_row, "speed", cells[c_speed]);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw EmptyTable();
  return table;
}

PhaseCycle resample_phase(const std::vector<double>& phase, const AngleGrid& samples,
                          int n_points, double speed_mps,
                          std::optional<double> stride_duration_s) {
  const int n_in = int(phase.size());
  if (n_in < 2 || samples.cols() != n_in) throw TooFewSamples();
  if (n_points < 2) throw TooFewSamples();
  for (int i = 1; i < n_in; ++i) {
    if (phase[i] < phase[i - 1]) {
      throw std::invalid_argument("phase must be non-decreasing within a cycle");
    }
  }
  const double lo = phase.front();
  const double span = phase.back() - lo;
  if (span <= 0.0) throw TooFewSamples();

  PhaseCycle out;
  out.speed_mps = speed_mps;
  out.stride_duration_s = stride_duration_s;
  out.angles_deg.resize(3, n_points);

  int seg = 0;
  for (int p = 0; p < n_points; ++p) {
    const double target = lo + span * (double(p) / double(n_points));
    while (seg + 2 < n_in && phase[seg + 1] <= target) ++seg;
    const double x0 = phase[seg];
    const double x1 = phase[seg + 1];
    const double w = x1 > x0 ? (target - x0) / (x1 - x0) : 0.0;
    out.angles_deg.col(p) = (1.0 - w) * samples.col(seg) + w * samples.col(seg + 1);
  }
  return out;
}

std::vector<MeanGaitProfile> aggregate_mean(const std::vector<PhaseCycle>& cycles,
                                            double group_tolerance) {
  if (cycles.empty()) return {};
  const int n_points = cycles.front().n_points();
  for (const auto& c : cycles) {
    if (c.n_points() != n_points) throw MixedResolution();
  }

  std::vector<const PhaseCycle*> sorted;
  sorted.reserve(cycles.size());
  for (const auto& c : cycles) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PhaseCycle* a, const PhaseCycle* b) { return a->speed_mps < b->speed_mps; });

  std::vector<MeanGaitProfile> profiles;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    const double anchor = sorted[i]->speed_mps;
    while (j < sorted.size() && sorted[j]->speed_mps - anchor <= group_tolerance) ++j;

    MeanGaitProfile prof;
    prof.angles_deg = AngleGrid::Zero(3, n_points);
    double speed_sum = 0.0;
    double dur_sum = 0.0;
    int dur_count = 0;
    for (size_t k = i; k < j; ++k) {
      prof.angles_deg += sorted[k]->angles_deg;
      speed_sum += sorted[k]->speed_mps;
      if (sorted[k]->stride_duration_s) {
        dur_sum += *sorted[k]->stride_duration_s;
        ++dur_count;
      }
    }
    const double n = double(j - i);
    prof.angles_deg /= n;
    prof.speed_mps = speed_sum / n;
    if (dur_count > 0) prof.stride_duration_s = dur_sum / dur_count;
    profiles.push_back(std::move(prof));
    i = j;
  }
  return profiles;
}

std::vector<MeanGaitProfile> ingest_table(const GaitTable& table, int n_points,
                                          double group_tolerance) {
  // One cycle = one (subject, nominal speed, cycle id) group; rows keep
  // file order inside the group.
  std::map<std::tuple<std::string, double, long>, std::vector<const GaitRow*>> groups;
  for (const auto& row : table.rows) {
    groups[{row.subject_id, row.speed_mps, row.cycle_id}].push_back(&row);
  }

  std::vector<PhaseCycle> cycles;
  for (const auto& [key, rows] : groups) {
    std::vector<double> phase(rows.size());
    AngleGrid samples(3, rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      phase[i] = rows[i]->phase_or_time;
      samples(kHip, i) = rows[i]->hip_deg;
      samples(kKnee, i) = rows[i]->knee_deg;
      samples(kAnkle, i) = rows[i]->ankle_deg;
    }
    std::optional<double> duration;
    if (table.time_indexed) duration = phase.back() - phase.front();
    cycles.push_back(resample_phase(phase, samples, n_points, rows.front()->speed_mps, duration));
  }
  return aggregate_mean(cycles, group_tolerance);
}

}  // namespace gaitforge::gait
