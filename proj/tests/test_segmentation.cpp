#include "core/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "doctest.h"

using namespace fdreg;

TEST_CASE("uniform split places evenly spaced boundaries") {
  const auto scheme = build_uniform(std::vector<double>{0.0}, std::vector<double>{20.0}, 10);
  const auto bounds = scheme.boundaries(0);
  REQUIRE(bounds.size() == 9);
  for (std::size_t s = 0; s < bounds.size(); ++s) {
    CHECK(bounds[s] == 2.0 * static_cast<double>(s + 1));
  }

  const auto campus = build_uniform(std::vector<double>{0.0, 0.0},
                                    std::vector<double>{390.0, 270.0}, 10);
  CHECK(campus.boundaries(0)[0] == 39.0);
  CHECK(campus.boundaries(0)[1] == 78.0);
  CHECK(campus.boundaries(1)[0] == 27.0);
  CHECK(campus.boundaries(1)[1] == 54.0);
}

TEST_CASE("single segment has no interior boundaries and absorbs everything") {
  const auto scheme = build_uniform(std::vector<double>{0.0}, std::vector<double>{20.0}, 1);
  CHECK(scheme.boundaries(0).empty());
  CHECK(scheme.assign(0, -1e9) == 0);
  CHECK(scheme.assign(0, 0.0) == 0);
  CHECK(scheme.assign(0, 1e9) == 0);
}

TEST_CASE("uniform split rejects bad arguments") {
  CHECK_THROWS_AS(build_uniform(std::vector<double>{0.0}, std::vector<double>{20.0}, 0),
                  ConfigError);
  CHECK_THROWS_AS(build_uniform(std::vector<double>{20.0}, std::vector<double>{0.0}, 4),
                  ConfigError);
  CHECK_THROWS_AS(build_uniform(std::vector<double>{5.0}, std::vector<double>{5.0}, 4),
                  ConfigError);
}

TEST_CASE("assignment uses half-open intervals with open ends") {
  const auto scheme = build_uniform(std::vector<double>{0.0}, std::vector<double>{20.0}, 10);
  CHECK(scheme.assign(0, 3.5) == 1);   // [2, 4)
  CHECK(scheme.assign(0, -5.0) == 0);  // (-inf, 2)
  CHECK(scheme.assign(0, 25.0) == 9);  // [18, +inf)
  CHECK(scheme.assign(0, 2.0) == 1);   // boundary belongs to the right interval
  CHECK(scheme.assign(0, 18.0) == 9);
}

TEST_CASE("density split cuts at sample midpoints") {
  const std::vector<double> targets = {1.0, 2.0, 3.0, 4.0};
  const auto scheme = build_density(targets, 1, 2);
  REQUIRE(scheme.boundaries(0).size() == 1);
  CHECK(scheme.boundaries(0)[0] == 2.5);
  CHECK(scheme.assign(0, 1.0) == 0);
  CHECK(scheme.assign(0, 2.0) == 0);
  CHECK(scheme.assign(0, 3.0) == 1);
  CHECK(scheme.assign(0, 4.0) == 1);
}

TEST_CASE("density split rejects ties and undersized samples") {
  const std::vector<double> tied = {3.0, 3.0, 3.0, 3.0};
  CHECK_THROWS_AS(build_density(tied, 1, 2), ConfigError);
  const std::vector<double> tiny = {1.0, 2.0};
  CHECK_THROWS_AS(build_density(tiny, 1, 3), ConfigError);
}

TEST_CASE("density split of a uniform grid approaches the uniform boundaries") {
  std::vector<double> targets(100);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    targets[i] = 20.0 * static_cast<double>(i) / 99.0;
  }
  const auto scheme = build_density(targets, 1, 10);
  const double width = 2.0;
  for (std::size_t s = 0; s < 9; ++s) {
    const double uniform_boundary = 2.0 * static_cast<double>(s + 1);
    CHECK(std::abs(scheme.boundaries(0)[s] - uniform_boundary) <= width / 2.0);
  }
}

TEST_CASE("density split balances populations within one sample") {
  Rng rng(4242);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 30 + rng.below(200);
    const std::size_t segments = 2 + rng.below(9);
    std::vector<double> targets(n);
    for (double& t : targets) {
      const double u = rng.uniform();
      t = u * u * u * 50.0;  // heavily skewed
    }
    const auto scheme = build_density(targets, 1, segments);
    std::vector<std::size_t> population(segments, 0);
    for (const double t : targets) population[scheme.assign(0, t)]++;
    const auto [lo, hi] = std::minmax_element(population.begin(), population.end());
    CHECK(*hi - *lo <= 1);
  }
}

TEST_CASE("accumulate indexes by label and averages predictions") {
  const auto scheme = build_uniform(std::vector<double>{0.0}, std::vector<double>{20.0}, 10);
  SegmentStats stats(1, 10);

  const std::vector<double> label = {3.0};  // segment 1
  const std::vector<double> pred_a = {1.0};
  const std::vector<double> pred_b = {3.0};
  stats.accumulate(label, pred_a, scheme);
  CHECK(stats.total_count(0) == 1);
  CHECK(stats.count(0, 1) == 1);
  stats.accumulate(label, pred_b, scheme);

  const SegmentTable table = stats.finalize();
  REQUIRE(table.cell(0, 1).has_value());
  CHECK(*table.cell(0, 1) == 2.0);
  CHECK_FALSE(table.cell(0, 0).has_value());
}

TEST_CASE("finalize: empty cells stay absent, sums divide by counts") {
  SegmentStats stats(1, 3);
  const SegmentTable empty = stats.finalize();
  for (std::size_t s = 0; s < 3; ++s) CHECK_FALSE(empty.cell(0, s).has_value());

  const auto scheme = build_uniform(std::vector<double>{0.0}, std::vector<double>{3.0}, 3);
  const std::vector<double> label = {0.5};
  for (const double p : {1.0, 2.0, 3.0}) {
    const std::vector<double> pred = {p};
    stats.accumulate(label, pred, scheme);
  }
  CHECK(stats.sum(0, 0) == 6.0);
  CHECK(*stats.finalize().cell(0, 0) == 2.0);
}

TEST_CASE("accumulate/finalize equals a brute-force mean on random traces") {
  Rng rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t dims = 1 + rng.below(3);
    const std::size_t segments = 1 + rng.below(8);
    const auto scheme = build_uniform(std::vector<double>(dims, -1.0),
                                      std::vector<double>(dims, 1.0), segments);
    SegmentStats stats(dims, segments);
    std::vector<std::vector<std::vector<double>>> cells(
        dims, std::vector<std::vector<double>>(segments));
    const std::size_t n = 1 + rng.below(60);
    std::vector<double> label(dims), pred(dims);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dims; ++d) {
        label[d] = rng.uniform(-1.5, 1.5);
        pred[d] = rng.uniform(-2.0, 2.0);
      }
      stats.accumulate(label, pred, scheme);
      for (std::size_t d = 0; d < dims; ++d) {
        cells[d][scheme.assign(d, label[d])].push_back(pred[d]);
      }
    }
    const SegmentTable table = stats.finalize();
    for (std::size_t d = 0; d < dims; ++d) {
      CHECK(stats.total_count(d) == n);
      for (std::size_t s = 0; s < segments; ++s) {
        if (cells[d][s].empty()) {
          CHECK_FALSE(table.cell(d, s).has_value());
          continue;
        }
        double mean = 0.0;
        for (const double v : cells[d][s]) mean += v;
        mean /= static_cast<double>(cells[d][s].size());
        REQUIRE(table.cell(d, s).has_value());
        CHECK(*table.cell(d, s) == doctest::Approx(mean).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("server_distill: three clients, leave-one-out means") {
  std::vector<SegmentTable> uploads(3, SegmentTable(1, 1));
  uploads[0].cell(0, 0) = 1.0;
  uploads[1].cell(0, 0) = 2.0;
  uploads[2].cell(0, 0) = 3.0;
  const auto teachers = server_distill(uploads, 7);
  CHECK(*teachers[0].values.cell(0, 0) == 2.5);
  CHECK(*teachers[1].values.cell(0, 0) == 2.0);
  CHECK(*teachers[2].values.cell(0, 0) == 1.5);
  CHECK(teachers[0].round == 7);
}

TEST_CASE("server_distill: a silent client still receives, a lone reporter does not") {
  std::vector<SegmentTable> uploads(2, SegmentTable(1, 1));
  uploads[0].cell(0, 0) = 4.0;  // client 2 reports nothing
  const auto teachers = server_distill(uploads, 1);
  CHECK_FALSE(teachers[0].values.cell(0, 0).has_value());
  REQUIRE(teachers[1].values.cell(0, 0).has_value());
  CHECK(*teachers[1].values.cell(0, 0) == 4.0);
}

TEST_CASE("server_distill needs a peer") {
  std::vector<SegmentTable> uploads(1, SegmentTable(1, 1));
  CHECK_THROWS_AS(server_distill(uploads, 0), ConfigError);
}

TEST_CASE("server_distill equals brute force over random sparsity") {
  Rng rng(31415);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t clients = 2 + rng.below(9);
    const std::size_t dims = 1 + rng.below(3);
    const std::size_t segments = 1 + rng.below(10);
    std::vector<SegmentTable> uploads(clients, SegmentTable(dims, segments));
    for (auto& table : uploads) {
      for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t s = 0; s < segments; ++s) {
          if (rng.uniform() < 0.7) table.cell(d, s) = rng.uniform(-3.0, 3.0);
        }
      }
    }
    const auto teachers = server_distill(uploads, 3);
    for (std::size_t k = 0; k < clients; ++k) {
      for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t s = 0; s < segments; ++s) {
          double sum = 0.0;
          std::size_t reporters = 0;
          for (std::size_t other = 0; other < clients; ++other) {
            if (other == k || !uploads[other].cell(d, s).has_value()) continue;
            sum += *uploads[other].cell(d, s);
            ++reporters;
          }
          const auto& cell = teachers[k].values.cell(d, s);
          if (reporters == 0) {
            CHECK_FALSE(cell.has_value());
          } else {
            REQUIRE(cell.has_value());
            CHECK(std::abs(*cell - sum / static_cast<double>(reporters)) <= 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("server_distill satisfies the leave-one-out identity on full cells") {
  Rng rng(555);
  const std::size_t clients = 6;
  std::vector<SegmentTable> uploads(clients, SegmentTable(2, 4));
  for (auto& table : uploads) {
    for (std::size_t d = 0; d < 2; ++d) {
      for (std::size_t s = 0; s < 4; ++s) table.cell(d, s) = rng.uniform(-1.0, 1.0);
    }
  }
  const auto teachers = server_distill(uploads, 1);
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t s = 0; s < 4; ++s) {
      double mean = 0.0;
      for (const auto& table : uploads) mean += *table.cell(d, s);
      mean /= static_cast<double>(clients);
      for (std::size_t k = 0; k < clients; ++k) {
        const double lhs = static_cast<double>(clients) * mean - *uploads[k].cell(d, s);
        const double rhs =
            static_cast<double>(clients - 1) * *teachers[k].values.cell(d, s);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
      }
    }
  }
}

TEST_CASE("server_distill is permutation-equivariant") {
  // integer-valued uploads keep every mean exact
  std::vector<SegmentTable> uploads(4, SegmentTable(1, 3));
  Rng rng(8);
  for (auto& table : uploads) {
    for (std::size_t s = 0; s < 3; ++s) {
      if (rng.uniform() < 0.8) table.cell(0, s) = static_cast<double>(rng.below(16));
    }
  }
  const auto base = server_distill(uploads, 2);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<SegmentTable> shuffled;
  for (const std::size_t i : perm) shuffled.push_back(uploads[i]);
  const auto permuted = server_distill(shuffled, 2);
  for (std::size_t rank = 0; rank < perm.size(); ++rank) {
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(permuted[rank].values.cell(0, s) == base[perm[rank]].values.cell(0, s));
    }
  }
}

TEST_CASE("assignment is total and unique for random values") {
  Rng rng(2718);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t segments = 1 + rng.below(12);
    const auto scheme = build_uniform(std::vector<double>{rng.uniform(-100.0, 0.0)},
                                      std::vector<double>{rng.uniform(1.0, 100.0)}, segments);
    const double value = rng.uniform(-500.0, 500.0);
    const std::size_t s = scheme.assign(0, value);
    REQUIRE(s < segments);
    const auto bounds = scheme.boundaries(0);
    if (s > 0) CHECK(value >= bounds[s - 1]);
    if (s + 1 < segments) CHECK(value < bounds[s]);
  }
}

TEST_CASE("segment csv round trip for stats and teacher tables") {
  const auto scheme = build_uniform(std::vector<double>{0.0, 0.0},
                                    std::vector<double>{4.0, 4.0}, 4);
  SegmentStats stats(2, 4);
  const std::vector<double> label = {1.5, 3.5};
  const std::vector<double> pred = {1.25, 3.75};
  stats.accumulate(label, pred, scheme);
  stats.accumulate(label, pred, scheme);

  const auto stat_rows = segment_rows(3, stats);
  REQUIRE(stat_rows.size() == 2);
  CHECK(stat_rows[0].count == 2);
  CHECK(stat_rows[0].value == 1.25);

  TeacherTable teacher;
  teacher.values = SegmentTable(2, 4);
  teacher.values.cell(0, 1) = -0.5;
  const auto teacher_rows = segment_rows(4, teacher);
  REQUIRE(teacher_rows.size() == 1);
  CHECK(teacher_rows[0].count == 0);

  std::vector<SegmentCsvRow> all = stat_rows;
  all.insert(all.end(), teacher_rows.begin(), teacher_rows.end());
  std::stringstream stream;
  write_segment_rows(stream, all);
  const auto parsed = read_segment_rows(stream, "test");
  REQUIRE(parsed.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(parsed[i].client == all[i].client);
    CHECK(parsed[i].dimension == all[i].dimension);
    CHECK(parsed[i].segment == all[i].segment);
    CHECK(parsed[i].value == all[i].value);
    CHECK(parsed[i].count == all[i].count);
  }
}
