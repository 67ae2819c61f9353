#include "subratio/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subratio/error.hpp"

namespace subratio {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

void put_number(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void write_header(std::ostream& os, const json& header) { os << "# " << header.dump() << '\n'; }

double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InputFormatError("trace line " + std::to_string(line) + ": bad number '" +
                           std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

json grid_to_json(const SubcarrierGrid& grid) {
  json arr = json::array();
  for (const auto& s : grid.subcarriers()) {
    arr.push_back({{"field", std::string(to_string(s.field))},
                   {"n", s.physical_index},
                   {"frequency_hz", s.frequency_hz}});
  }
  return arr;
}

SubcarrierGrid grid_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw InputFormatError("trace header: missing subcarrier list");
  std::vector<Subcarrier> subs;
  for (const auto& e : arr) {
    Subcarrier s;
    s.field = parse_ltf_field(e.at("field").get<std::string>());
    s.physical_index = e.at("n").get<int>();
    s.frequency_hz = e.at("frequency_hz").get<double>();
    subs.push_back(s);
  }
  try {
    return SubcarrierGrid(std::move(subs));
  } catch (const ConfigError& err) {
    throw InputFormatError(std::string("trace header: ") + err.what());
  }
}

void write_rows(std::ostream& os, std::span<const cplx> series, double fs) {
  for (std::size_t k = 0; k < series.size(); ++k) {
    os << k << ',';
    put_number(os, static_cast<double>(k) / fs);
    os << ',';
    put_number(os, series[k].real());
    os << ',';
    put_number(os, series[k].imag());
    os << '\n';
  }
}

}  // namespace

void write_trace_csv(std::ostream& os, const CsiTrace& trace) {
  json header = {{"format", "csi-trace"},
                 {"version", kFormatVersion},
                 {"sample_rate_hz", trace.sample_rate_hz()},
                 {"first_index", trace.first_index()},
                 {"frames", trace.frame_count()},
                 {"subcarriers", grid_to_json(trace.grid())}};
  write_header(os, header);
  os << "k,t_s";
  for (std::size_t m = 0; m < trace.subcarrier_count(); ++m) os << ",re_" << m << ",im_" << m;
  os << '\n';
  for (std::size_t k = 0; k < trace.frame_count(); ++k) {
    os << trace.frame_index(k) << ',';
    put_number(os, trace.timestamp(k));
    for (std::size_t m = 0; m < trace.subcarrier_count(); ++m) {
      const cplx v = trace.at(k, m);
      os << ',';
      put_number(os, v.real());
      os << ',';
      put_number(os, v.imag());
    }
    os << '\n';
  }
}

CsiTrace read_trace_csv(std::istream& is) {
  std::string header_text;
  std::string line;
  std::size_t line_no = 0;
  bool have_columns = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') {
      header_text += line.substr(1);
      continue;
    }
    have_columns = true;
    break;
  }
  if (header_text.empty()) throw InputFormatError("trace: missing '#' JSON header");
  if (!have_columns) throw InputFormatError("trace: missing column header row");

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw InputFormatError(std::string("trace header is not valid JSON: ") + e.what());
  }

  double fs = 0;
  std::int64_t first_index = 0;
  std::shared_ptr<const SubcarrierGrid> grid;
  try {
    if (header.value("format", std::string()) != "csi-trace") {
      throw InputFormatError("trace header: format is not csi-trace");
    }
    fs = header.at("sample_rate_hz").get<double>();
    first_index = header.value("first_index", std::int64_t{0});
    grid = std::make_shared<const SubcarrierGrid>(grid_from_json(header.at("subcarriers")));
  } catch (const json::exception& e) {
    throw InputFormatError(std::string("trace header: ") + e.what());
  }
  if (!(fs > 0.0)) throw InputFormatError("trace header: sample rate must be positive");

  const std::size_t m_count = grid->size();
  const auto columns = split(line);
  if (columns.size() != 2 + 2 * m_count || columns[0] != "k" || columns[1] != "t_s") {
    throw InputFormatError("trace: column header does not match the subcarrier list");
  }

  std::vector<std::vector<cplx>> rows;
  std::int64_t expected = first_index;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 2 + 2 * m_count) {
      throw InputFormatError("trace line " + std::to_string(line_no) + ": expected " +
                             std::to_string(2 + 2 * m_count) + " columns");
    }
    std::int64_t k = 0;
    const auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), k);
    if (ec != std::errc() || ptr != cells[0].data() + cells[0].size()) {
      throw InputFormatError("trace line " + std::to_string(line_no) + ": bad frame index");
    }
    if (k != expected) {
      throw InputFormatError("trace line " + std::to_string(line_no) + ": frame index " +
                             std::to_string(k) + " breaks the uniform sequence");
    }
    ++expected;
    std::vector<cplx> values(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
      values[m] = {parse_double(cells[2 + 2 * m], line_no), parse_double(cells[3 + 2 * m], line_no)};
      if (!std::isfinite(values[m].real()) || !std::isfinite(values[m].imag())) {
        throw InputFormatError("trace line " + std::to_string(line_no) + ": non-finite value");
      }
    }
    rows.push_back(std::move(values));
  }

  CsiTrace trace(grid, fs, rows.size(), first_index);
  for (std::size_t k = 0; k < rows.size(); ++k) trace.set_frame(k, rows[k]);
  return trace;
}

void write_trace_file(const std::filesystem::path& path, const CsiTrace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputFormatError("cannot open " + path.string() + " for writing");
  write_trace_csv(os, trace);
}

CsiTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputFormatError("cannot open trace file " + path.string());
  return read_trace_csv(is);
}

void write_stream_csv(std::ostream& os, const CscrStream& stream, const SubcarrierGrid& grid) {
  json terms = json::array();
  for (const auto& t : stream.numerator) {
    terms.push_back({{"m", t.subcarrier},
                     {"n", grid[t.subcarrier].physical_index},
                     {"weight_re", t.weight.real()},
                     {"weight_im", t.weight.imag()}});
  }
  json header = {{"format", "cscr-stream"},
                 {"version", kFormatVersion},
                 {"sample_rate_hz", stream.sample_rate_hz},
                 {"numerator", terms},
                 {"denominator", {{"m", stream.denominator},
                                  {"n", grid[stream.denominator].physical_index}}},
                 {"repaired_samples", stream.repaired_samples}};
  write_header(os, header);
  os << "k,t_s,re,im\n";
  write_rows(os, stream.values, stream.sample_rate_hz);
}

void write_complex_csv(std::ostream& os, std::span<const cplx> series, double fs,
                       std::string_view description) {
  write_header(os, {{"format", "complex-series"},
                    {"version", kFormatVersion},
                    {"sample_rate_hz", fs},
                    {"description", std::string(description)}});
  os << "k,t_s,re,im\n";
  write_rows(os, series, fs);
}

void write_real_csv(std::ostream& os, std::span<const double> series, double fs,
                    std::string_view description) {
  write_header(os, {{"format", "real-series"},
                    {"version", kFormatVersion},
                    {"sample_rate_hz", fs},
                    {"description", std::string(description)}});
  os << "k,t_s,value\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    os << k << ',';
    put_number(os, static_cast<double>(k) / fs);
    os << ',';
    put_number(os, series[k]);
    os << '\n';
  }
}

}  // namespace subratio
