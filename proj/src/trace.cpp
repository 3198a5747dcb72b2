#include "fixnet/trace.hpp"

#include "fixnet/error.hpp"
#include "fixnet/numfmt.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace fixnet {

namespace {

template <class F>
std::vector<double> column(const RunTrace& t, F f) {
  std::vector<double> out;
  out.reserve(t.records.size());
  for (const auto& r : t.records) out.push_back(f(r));
  return out;
}

std::string header_line(const RunTrace& t) {
  std::ostringstream h;
  h << "# fixnet-trace v" << kTraceFormatVersion << " agents=" << t.agents
    << " distance=" << (t.has_distance ? 1 : 0)
    << " weighted=" << (t.has_weighted ? 1 : 0) << " stop=" << t.stop_reason;
  return h.str();
}

std::string field_value(const std::string& header, const std::string& key) {
  const std::string tag = " " + key + "=";
  const auto pos = header.find(tag);
  if (pos == std::string::npos) {
    throw ConfigError("trace header lacks '" + key + "'");
  }
  const auto start = pos + tag.size();
  const auto end = header.find(' ', start);
  return header.substr(start, end == std::string::npos ? std::string::npos
                                                       : end - start);
}

}  // namespace

std::vector<double> RunTrace::column_max_residual() const {
  return column(*this, [](const TraceRecord& r) { return r.max_residual; });
}
std::vector<double> RunTrace::column_max_consensus() const {
  return column(*this, [](const TraceRecord& r) { return r.max_consensus; });
}
std::vector<double> RunTrace::column_d2() const {
  return column(*this, [](const TraceRecord& r) { return r.d2; });
}
std::vector<double> RunTrace::column_weighted_d2() const {
  return column(*this, [](const TraceRecord& r) { return r.weighted_d2; });
}
std::vector<double> RunTrace::column_residual(std::size_t agent) const {
  return column(*this,
                [agent](const TraceRecord& r) { return r.residual.at(agent); });
}

std::vector<std::string> trace_columns(const RunTrace& t) {
  std::vector<std::string> cols{"k"};
  auto per_agent = [&](const char* stem) {
    for (std::size_t i = 0; i < t.agents; ++i) {
      cols.push_back(std::string(stem) + "_" + std::to_string(i));
    }
  };
  per_agent("residual");
  per_agent("consensus");
  if (t.has_distance) per_agent("distance");
  per_agent("error");
  if (t.has_distance) cols.emplace_back("d2");
  cols.emplace_back("max_residual");
  cols.emplace_back("max_consensus");
  if (t.has_weighted) cols.emplace_back("weighted_d2");
  return cols;
}

void write_trace(std::ostream& out, const RunTrace& t) {
  out << header_line(t) << '\n';
  const auto cols = trace_columns(t);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out << (c ? "," : "") << cols[c];
  }
  out << '\n';
  for (const auto& r : t.records) {
    out << r.k;
    auto put = [&out](const std::vector<double>& v) {
      for (double x : v) out << ',' << format_double(x);
    };
    put(r.residual);
    put(r.consensus);
    if (t.has_distance) put(r.distance);
    put(r.error_norm);
    if (t.has_distance) out << ',' << format_double(r.d2);
    out << ',' << format_double(r.max_residual);
    out << ',' << format_double(r.max_consensus);
    if (t.has_weighted) out << ',' << format_double(r.weighted_d2);
    out << '\n';
  }
}

RunTrace read_trace(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) ||
      header.rfind("# fixnet-trace v", 0) != 0) {
    throw ConfigError("not a fixnet trace");
  }
  const int version = std::stoi(header.substr(16));
  if (version != kTraceFormatVersion) {
    throw ConfigError("unsupported trace version " + std::to_string(version));
  }
  RunTrace t;
  t.agents = parse_size(field_value(header, "agents"));
  t.has_distance = field_value(header, "distance") == "1";
  t.has_weighted = field_value(header, "weighted") == "1";
  t.stop_reason = field_value(header, "stop");

  std::string names;
  if (!std::getline(in, names)) throw ConfigError("trace lacks column names");
  const auto expected = trace_columns(t);
  const auto got = split_fields(names, ',');
  if (got.size() != expected.size()) throw ConfigError("trace column mismatch");
  for (std::size_t c = 0; c < got.size(); ++c) {
    if (got[c] != expected[c]) throw ConfigError("trace column mismatch");
  }

  const std::size_t n = t.agents;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != expected.size()) throw ConfigError("trace row width mismatch");
    TraceRecord r;
    std::size_t c = 0;
    r.k = parse_size(f[c++]);
    auto take = [&](std::vector<double>& v) {
      v.resize(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = parse_double(f[c++]);
    };
    take(r.residual);
    take(r.consensus);
    if (t.has_distance) take(r.distance);
    take(r.error_norm);
    if (t.has_distance) r.d2 = parse_double(f[c++]);
    r.max_residual = parse_double(f[c++]);
    r.max_consensus = parse_double(f[c++]);
    if (t.has_weighted) r.weighted_d2 = parse_double(f[c++]);
    t.records.push_back(std::move(r));
  }
  return t;
}

}  // namespace fixnet
