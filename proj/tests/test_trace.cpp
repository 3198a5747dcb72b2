#include "fixnet/app.hpp"
#include "fixnet/error.hpp"
#include "fixnet/io.hpp"
#include "fixnet/trace.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace fixnet {
namespace {

RunTrace sample_trace(bool distance, bool weighted) {
  RunTrace t;
  t.agents = 2;
  t.has_distance = distance;
  t.has_weighted = weighted;
  t.stop_reason = "budget";
  for (std::size_t k = 0; k < 4; ++k) {
    TraceRecord r;
    r.k = k;
    r.residual = {1.0 / (k + 1), 0.1 + 1e-17 * k};
    r.consensus = {0.3 / (k + 3), 2.0 / 3.0};
    if (distance) r.distance = {1e-300, 12345.678};
    r.error_norm = {0.0, 0.01 * k};
    r.d2 = distance ? 0.123456789012345678 : 0.0;
    r.max_residual = 1.0 / (k + 1);
    r.max_consensus = 2.0 / 3.0;
    r.weighted_d2 = weighted ? 7.0 / 3.0 : 0.0;
    t.records.push_back(r);
  }
  return t;
}

void expect_same(const RunTrace& a, const RunTrace& b) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.agents, b.agents);
  EXPECT_EQ(a.has_distance, b.has_distance);
  EXPECT_EQ(a.has_weighted, b.has_weighted);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto &x = a.records[k], &y = b.records[k];
    EXPECT_EQ(x.k, y.k);
    EXPECT_EQ(x.residual, y.residual);
    EXPECT_EQ(x.consensus, y.consensus);
    EXPECT_EQ(x.distance, y.distance);
    EXPECT_EQ(x.error_norm, y.error_norm);
    EXPECT_EQ(x.d2, y.d2);
    EXPECT_EQ(x.max_residual, y.max_residual);
    EXPECT_EQ(x.max_consensus, y.max_consensus);
    EXPECT_EQ(x.weighted_d2, y.weighted_d2);
  }
}

TEST(Trace, RoundTripIsExact) {
  for (bool d : {false, true}) {
    for (bool w : {false, true}) {
      const auto t = sample_trace(d, w);
      std::stringstream ss;
      write_trace(ss, t);
      expect_same(t, read_trace(ss));
    }
  }
}

TEST(Trace, ColumnOrder) {
  const auto cols = trace_columns(sample_trace(true, false));
  ASSERT_GE(cols.size(), 11u);
  EXPECT_EQ(cols[0], "k");
  EXPECT_EQ(cols[1], "residual_0");
  EXPECT_EQ(cols[2], "residual_1");
  EXPECT_EQ(cols[3], "consensus_0");
  EXPECT_EQ(cols[5], "distance_0");
  EXPECT_EQ(cols[7], "error_0");
  EXPECT_EQ(cols[9], "d2");
  EXPECT_EQ(cols[10], "max_residual");
  const auto no_oracle = trace_columns(sample_trace(false, false));
  EXPECT_EQ(std::count(no_oracle.begin(), no_oracle.end(), "d2"), 0);
}

TEST(Trace, MalformedInputThrows) {
  std::istringstream empty("");
  EXPECT_THROW(read_trace(empty), ConfigError);
  std::istringstream wrong("# fixnet-trace v99\nk\n0\n");
  EXPECT_THROW(read_trace(wrong), ConfigError);
}

TEST(Trace, Columns) {
  const auto t = sample_trace(true, true);
  EXPECT_EQ(t.column_residual(0)[1], 0.5);
  EXPECT_EQ(t.column_weighted_d2()[3], 7.0 / 3.0);
  EXPECT_EQ(t.column_max_consensus().size(), 4u);
}

TEST(PlotData, RoundTrip) {
  PlotData p{"residual vs k", {"log_k", "log_r"}, {{0.0, 1.5}, {0.6931471805599453, -1e-300}}};
  const auto back = parse_plot_data(format_plot_data(p));
  EXPECT_EQ(back.title, p.title);
  EXPECT_EQ(back.columns, p.columns);
  EXPECT_EQ(back.rows, p.rows);
  EXPECT_THROW(parse_plot_data("garbage\n"), ConfigError);
}

TEST(Io, AtomicWriteReplacesFile) {
  const auto dir = std::filesystem::temp_directory_path() / "fixnet-io-test";
  std::filesystem::create_directories(dir);
  const auto f = dir / "a.txt";
  write_file_atomic(f, "one");
  write_file_atomic(f, "two");
  EXPECT_EQ(read_file(f), "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fixnet
