#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fdreg {

enum class SplitStrategy { kUniform, kDensity };

// Partition of each target dimension into `segment_count` half-open
// intervals. Dimension d with interior boundaries b[0] < ... < b[S-2]
// yields segments (-inf, b[0]), [b[0], b[1]), ..., [b[S-2], +inf), so
// every finite value maps to exactly one segment.
class SegmentScheme {
 public:
  SegmentScheme() = default;
  SegmentScheme(std::size_t segment_count, SplitStrategy strategy,
                std::vector<std::vector<double>> boundaries);

  std::size_t segment_count() const { return segment_count_; }
  std::size_t dimensions() const { return boundaries_.size(); }
  SplitStrategy strategy() const { return strategy_; }
  std::span<const double> boundaries(std::size_t dim) const;

  // 0-based segment index of `value` in dimension `dim`
  std::size_t assign(std::size_t dim, double value) const;
  void assign(std::span<const double> point, std::span<std::size_t> out) const;

 private:
  std::size_t segment_count_ = 1;
  SplitStrategy strategy_ = SplitStrategy::kUniform;
  std::vector<std::vector<double>> boundaries_;
};

// Equal-width intervals between per-dimension bounds.
SegmentScheme build_uniform(std::span<const double> y_min, std::span<const double> y_max,
                            std::size_t segment_count);

// Equal-count intervals: interior boundaries at the s/S empirical quantiles
// of `targets` (row-major, `dims` values per sample), taken as the midpoint
// between the two straddling order statistics. Segment populations on the
// build data differ by at most one. Tied values at a cut make an
// equal-count split impossible and raise ConfigError.
SegmentScheme build_density(std::span<const double> targets, std::size_t dims,
                            std::size_t segment_count);

// Value-or-absent grid over (dimension, segment) cells.
class SegmentTable {
 public:
  SegmentTable() = default;
  SegmentTable(std::size_t dims, std::size_t segments);

  std::size_t dimensions() const { return dims_; }
  std::size_t segments() const { return segments_; }
  std::optional<double>& cell(std::size_t dim, std::size_t segment);
  const std::optional<double>& cell(std::size_t dim, std::size_t segment) const;

 private:
  std::size_t dims_ = 0;
  std::size_t segments_ = 0;
  std::vector<std::optional<double>> cells_;
};

// Running per-cell prediction sums and counts. The segment of a sample is
// chosen by its label; the accumulated value is the model's prediction.
class SegmentStats {
 public:
  SegmentStats() = default;
  SegmentStats(std::size_t dims, std::size_t segments);

  std::size_t dimensions() const { return dims_; }
  std::size_t segments() const { return segments_; }

  void accumulate(std::span<const double> label, std::span<const double> prediction,
                  const SegmentScheme& scheme);

  // average where count > 0, absent otherwise
  SegmentTable finalize() const;
  void reset();

  double sum(std::size_t dim, std::size_t segment) const;
  std::uint64_t count(std::size_t dim, std::size_t segment) const;
  std::uint64_t total_count(std::size_t dim) const;

 private:
  std::size_t dims_ = 0;
  std::size_t segments_ = 0;
  std::vector<double> sums_;
  std::vector<std::uint64_t> counts_;
};

// Leave-one-out averages one client distills from: values from everyone
// else, built fresh from the reports of round `round`.
struct TeacherTable {
  SegmentTable values;
  std::uint32_t round = 0;
};

// For each client, the mean over the *other* clients' reported cell values.
// A teacher cell is absent when no other client reported that cell.
std::vector<TeacherTable> server_distill(std::span<const SegmentTable> uploads,
                                         std::uint32_t round);

// CSV layout shared by stats and teacher tables:
// client,dimension,segment,value,count. Stats rows carry the finalized
// average and its sample count; teacher rows carry count 0.
struct SegmentCsvRow {
  int client = 0;
  std::uint32_t dimension = 0;
  std::uint32_t segment = 0;
  double value = 0.0;
  std::uint64_t count = 0;
};

void write_segment_rows(std::ostream& out, std::span<const SegmentCsvRow> rows);
std::vector<SegmentCsvRow> read_segment_rows(std::istream& in, const std::string& origin);
std::vector<SegmentCsvRow> segment_rows(int client, const SegmentStats& stats);
std::vector<SegmentCsvRow> segment_rows(int client, const TeacherTable& teacher);

}  // namespace fdreg
