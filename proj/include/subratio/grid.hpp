#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "subratio/types.hpp"

namespace subratio {

/// Preamble field a subcarrier estimate was taken from.
enum class LtfField { ht_ltf, l_ltf };

std::string_view to_string(LtfField field);
LtfField parse_ltf_field(std::string_view text);  // throws InputFormatError

struct Subcarrier {
  LtfField field = LtfField::ht_ltf;
  int physical_index = 0;   // n(m), signed OFDM tone index
  double frequency_hz = 0;  // center frequency of the tone

  double wavelength_m() const { return kSpeedOfLight / frequency_hz; }
  bool operator==(const Subcarrier&) const = default;
};

inline constexpr double kChannel11Ht40CenterHz = 2'452'000'000.0;
inline constexpr double kSubcarrierSpacingHz = 312'500.0;

/**
 * Ordered set of subcarriers observed by one receive antenna.
 *
 * Array position m (0-based) is distinct from the physical tone index n(m).
 * Within each preamble field the physical indices are strictly increasing.
 */
class SubcarrierGrid {
 public:
  SubcarrierGrid() = default;
  explicit SubcarrierGrid(std::vector<Subcarrier> subcarriers);

  /// 114 HT-LTF tones, n in [-58,-2] U [2,58].
  static SubcarrierGrid ht_ltf_40mhz(double center_hz = kChannel11Ht40CenterHz);
  /// 104 L-LTF tones (legacy 20 MHz preamble duplicated in both halves).
  static SubcarrierGrid l_ltf_40mhz(double center_hz = kChannel11Ht40CenterHz);
  /// 218 tones: HT-LTF at m = 0..113 followed by L-LTF at m = 114..217.
  static SubcarrierGrid combined_40mhz(double center_hz = kChannel11Ht40CenterHz);
  /// Arbitrary tone list on the standard 312.5 kHz raster.
  static SubcarrierGrid from_physical_indices(LtfField field, std::span<const int> indices,
                                              double center_hz = kChannel11Ht40CenterHz);

  std::size_t size() const { return subcarriers_.size(); }
  bool empty() const { return subcarriers_.empty(); }
  const Subcarrier& operator[](std::size_t m) const { return subcarriers_[m]; }
  std::span<const Subcarrier> subcarriers() const { return subcarriers_; }

  /// max n(m) - min n(m); used to normalize group-delay style phase ramps.
  int physical_span() const;

  bool operator==(const SubcarrierGrid&) const = default;

 private:
  std::vector<Subcarrier> subcarriers_;
};

}  // namespace subratio
