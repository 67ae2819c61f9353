#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>

#include "subratio/cscr.hpp"
#include "subratio/trace.hpp"

// CSV serialization. Every file starts with one '#'-prefixed line holding a
// JSON header, then a column-name row, then one row per sample. Numbers are
// written with 17 significant digits so values round-trip exactly.

namespace subratio {

/// Rows: k, t_s, then (re, im) per subcarrier in grid order. The header
/// records the sample rate, first frame index and every subcarrier's field,
/// physical index and center frequency.
void write_trace_csv(std::ostream& os, const CsiTrace& trace);

/// Inverse of write_trace_csv. Throws InputFormatError on malformed input.
CsiTrace read_trace_csv(std::istream& is);

void write_trace_file(const std::filesystem::path& path, const CsiTrace& trace);
CsiTrace read_trace_file(const std::filesystem::path& path);

/// Rows: k, t_s, re, im. The header describes the numerator terms and denominator.
void write_stream_csv(std::ostream& os, const CscrStream& stream, const SubcarrierGrid& grid);

/// Rows: k, t_s, re, im.
void write_complex_csv(std::ostream& os, std::span<const cplx> series, double sample_rate_hz,
                       std::string_view description);

/// Rows: k, t_s, value.
void write_real_csv(std::ostream& os, std::span<const double> series, double sample_rate_hz,
                    std::string_view description);

}  // namespace subratio
