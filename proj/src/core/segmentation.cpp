#include "core/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fdreg {

SegmentScheme::SegmentScheme(std::size_t segment_count, SplitStrategy strategy,
                             std::vector<std::vector<double>> boundaries)
    : segment_count_(segment_count), strategy_(strategy), boundaries_(std::move(boundaries)) {
  if (segment_count_ < 1) throw ConfigError("segment count must be at least 1");
  for (const auto& dim : boundaries_) {
    if (dim.size() + 1 != segment_count_) {
      throw ConfigError("segment scheme needs exactly S-1 interior boundaries per dimension");
    }
    for (std::size_t i = 0; i + 1 < dim.size(); ++i) {
      if (!(dim[i] < dim[i + 1])) {
        throw ConfigError("segment boundaries must be strictly increasing");
      }
    }
  }
}

std::span<const double> SegmentScheme::boundaries(std::size_t dim) const {
  return boundaries_.at(dim);
}

std::size_t SegmentScheme::assign(std::size_t dim, double value) const {
  if (!std::isfinite(value)) throw ConfigError("segment assignment needs a finite value");
  const auto& bounds = boundaries_.at(dim);
  return static_cast<std::size_t>(
      std::upper_bound(bounds.begin(), bounds.end(), value) - bounds.begin());
}

void SegmentScheme::assign(std::span<const double> point, std::span<std::size_t> out) const {
  if (point.size() != dimensions() || out.size() != dimensions()) {
    throw ConfigError("segment assignment dimension mismatch");
  }
  for (std::size_t d = 0; d < point.size(); ++d) out[d] = assign(d, point[d]);
}

SegmentScheme build_uniform(std::span<const double> y_min, std::span<const double> y_max,
                            std::size_t segment_count) {
  if (segment_count < 1) throw ConfigError("segment count must be at least 1");
  if (y_min.size() != y_max.size() || y_min.empty()) {
    throw ConfigError("uniform split needs matching, non-empty bounds");
  }
  std::vector<std::vector<double>> boundaries(y_min.size());
  for (std::size_t d = 0; d < y_min.size(); ++d) {
    if (!(y_min[d] < y_max[d])) {
      throw ConfigError("uniform split needs y_min < y_max in every dimension");
    }
    const double width = (y_max[d] - y_min[d]) / static_cast<double>(segment_count);
    boundaries[d].reserve(segment_count - 1);
    for (std::size_t s = 1; s < segment_count; ++s) {
      boundaries[d].push_back(y_min[d] + static_cast<double>(s) * width);
    }
  }
  return SegmentScheme(segment_count, SplitStrategy::kUniform, std::move(boundaries));
}

SegmentScheme build_density(std::span<const double> targets, std::size_t dims,
                            std::size_t segment_count) {
  if (segment_count < 1) throw ConfigError("segment count must be at least 1");
  if (dims == 0 || targets.size() % dims != 0) {
    throw ConfigError("density split: target array is not a multiple of the dimension count");
  }
  const std::size_t n = targets.size() / dims;
  if (n < segment_count) {
    throw ConfigError("density split needs at least as many samples as segments");
  }
  std::vector<std::vector<double>> boundaries(dims);
  std::vector<double> column(n);
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t i = 0; i < n; ++i) column[i] = targets[i * dims + d];
    std::sort(column.begin(), column.end());
    boundaries[d].reserve(segment_count - 1);
    for (std::size_t s = 1; s < segment_count; ++s) {
      const std::size_t pos = s * n / segment_count;
      const double lo = column[pos - 1];
      const double hi = column[pos];
      if (!(lo < hi)) {
        throw ConfigError("density split: tied target values prevent an equal-count split");
      }
      boundaries[d].push_back(lo + (hi - lo) / 2.0);
    }
  }
  return SegmentScheme(segment_count, SplitStrategy::kDensity, std::move(boundaries));
}

SegmentTable::SegmentTable(std::size_t dims, std::size_t segments)
    : dims_(dims), segments_(segments), cells_(dims * segments) {}

std::optional<double>& SegmentTable::cell(std::size_t dim, std::size_t segment) {
  return cells_.at(dim * segments_ + segment);
}

const std::optional<double>& SegmentTable::cell(std::size_t dim, std::size_t segment) const {
  return cells_.at(dim * segments_ + segment);
}

SegmentStats::SegmentStats(std::size_t dims, std::size_t segments)
    : dims_(dims), segments_(segments), sums_(dims * segments, 0.0),
      counts_(dims * segments, 0) {}

void SegmentStats::accumulate(std::span<const double> label,
                              std::span<const double> prediction,
                              const SegmentScheme& scheme) {
  if (label.size() != dims_ || prediction.size() != dims_ ||
      scheme.dimensions() != dims_ || scheme.segment_count() != segments_) {
    throw ConfigError("segment stats accumulation dimension mismatch");
  }
  for (std::size_t d = 0; d < dims_; ++d) {
    const std::size_t s = scheme.assign(d, label[d]);
    sums_[d * segments_ + s] += prediction[d];
    counts_[d * segments_ + s] += 1;
  }
}

SegmentTable SegmentStats::finalize() const {
  SegmentTable table(dims_, segments_);
  for (std::size_t d = 0; d < dims_; ++d) {
    for (std::size_t s = 0; s < segments_; ++s) {
      const std::uint64_t n = counts_[d * segments_ + s];
      if (n > 0) {
        table.cell(d, s) = sums_[d * segments_ + s] / static_cast<double>(n);
      }
    }
  }
  return table;
}

void SegmentStats::reset() {
  std::fill(sums_.begin(), sums_.end(), 0.0);
  std::fill(counts_.begin(), counts_.end(), 0);
}

double SegmentStats::sum(std::size_t dim, std::size_t segment) const {
  return sums_.at(dim * segments_ + segment);
}

std::uint64_t SegmentStats::count(std::size_t dim, std::size_t segment) const {
  return counts_.at(dim * segments_ + segment);
}

std::uint64_t SegmentStats::total_count(std::size_t dim) const {
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < segments_; ++s) total += counts_.at(dim * segments_ + s);
  return total;
}

std::vector<TeacherTable> server_distill(std::span<const SegmentTable> uploads,
                                         std::uint32_t round) {
  const std::size_t clients = uploads.size();
  if (clients < 2) throw ConfigError("distillation needs at least two clients");
  const std::size_t dims = uploads[0].dimensions();
  const std::size_t segments = uploads[0].segments();
  for (const auto& table : uploads) {
    if (table.dimensions() != dims || table.segments() != segments) {
      throw ConfigError("server_distill: upload tables have mismatched shapes");
    }
  }
  std::vector<TeacherTable> teachers(clients);
  for (auto& t : teachers) {
    t.values = SegmentTable(dims, segments);
    t.round = round;
  }
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t s = 0; s < segments; ++s) {
      for (std::size_t k = 0; k < clients; ++k) {
        double sum = 0.0;
        std::size_t reporters = 0;
        for (std::size_t other = 0; other < clients; ++other) {
          if (other == k) continue;
          const auto& cell = uploads[other].cell(d, s);
          if (cell.has_value()) {
            sum += *cell;
            ++reporters;
          }
        }
        if (reporters > 0) {
          teachers[k].values.cell(d, s) = sum / static_cast<double>(reporters);
        }
      }
    }
  }
  return teachers;
}

void write_segment_rows(std::ostream& out, std::span<const SegmentCsvRow> rows) {
  out << "client,dimension,segment,value,count\n";
  for (const auto& row : rows) {
    out << row.client << ',' << row.dimension << ',' << row.segment << ','
        << format_double(row.value) << ',' << row.count << '\n';
  }
}

std::vector<SegmentCsvRow> read_segment_rows(std::istream& in, const std::string& origin) {
  const CsvTable table = read_csv(in, origin);
  for (const char* name : {"client", "dimension", "segment", "value", "count"}) {
    if (table.column(name) < 0) {
      throw ParseError(origin + ": missing column '" + std::string(name) + "'");
    }
  }
  const auto col = [&](const char* name) {
    return static_cast<std::size_t>(table.column(name));
  };
  std::vector<SegmentCsvRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    SegmentCsvRow row;
    row.client = static_cast<int>(
        parse_double_cell(cells[col("client")], "client", i + 2, origin));
    row.dimension = static_cast<std::uint32_t>(
        parse_double_cell(cells[col("dimension")], "dimension", i + 2, origin));
    row.segment = static_cast<std::uint32_t>(
        parse_double_cell(cells[col("segment")], "segment", i + 2, origin));
    row.value = parse_double_cell(cells[col("value")], "value", i + 2, origin);
    row.count = static_cast<std::uint64_t>(
        parse_double_cell(cells[col("count")], "count", i + 2, origin));
    rows.push_back(row);
  }
  return rows;
}

std::vector<SegmentCsvRow> segment_rows(int client, const SegmentStats& stats) {
  std::vector<SegmentCsvRow> rows;
  for (std::size_t d = 0; d < stats.dimensions(); ++d) {
    for (std::size_t s = 0; s < stats.segments(); ++s) {
      const std::uint64_t n = stats.count(d, s);
      if (n == 0) continue;
      rows.push_back({client, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(s),
                      stats.sum(d, s) / static_cast<double>(n), n});
    }
  }
  return rows;
}

std::vector<SegmentCsvRow> segment_rows(int client, const TeacherTable& teacher) {
  std::vector<SegmentCsvRow> rows;
  for (std::size_t d = 0; d < teacher.values.dimensions(); ++d) {
    for (std::size_t s = 0; s < teacher.values.segments(); ++s) {
      const auto& cell = teacher.values.cell(d, s);
      if (!cell.has_value()) continue;
      rows.push_back({client, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(s),
                      *cell, 0});
    }
  }
  return rows;
}

}  // namespace fdreg
