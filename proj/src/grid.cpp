#include "subratio/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "subratio/error.hpp"

namespace subratio {

std::string_view to_string(LtfField field) {
  return field == LtfField::ht_ltf ? "HT-LTF" : "L-LTF";
}

LtfField parse_ltf_field(std::string_view text) {
  if (text == "HT-LTF") return LtfField::ht_ltf;
  if (text == "L-LTF") return LtfField::l_ltf;
  throw InputFormatError("unknown preamble field '" + std::string(text) + "'");
}

SubcarrierGrid::SubcarrierGrid(std::vector<Subcarrier> subcarriers)
    : subcarriers_(std::move(subcarriers)) {
  if (subcarriers_.empty()) throw ConfigError("subcarrier grid is empty");
  std::map<LtfField, int> last_index;
  for (const auto& sc : subcarriers_) {
    if (!(sc.frequency_hz > 0) || !std::isfinite(sc.frequency_hz)) {
      throw ConfigError("subcarrier frequency must be positive and finite");
    }
    auto it = last_index.find(sc.field);
    if (it != last_index.end() && sc.physical_index <= it->second) {
      throw ConfigError("physical indices must be strictly increasing within field " +
                        std::string(to_string(sc.field)));
    }
    last_index[sc.field] = sc.physical_index;
  }
}

SubcarrierGrid SubcarrierGrid::from_physical_indices(LtfField field, std::span<const int> indices,
                                                     double center_hz) {
  std::vector<Subcarrier> subs;
  subs.reserve(indices.size());
  for (int n : indices) {
    subs.push_back({field, n, center_hz + n * kSubcarrierSpacingHz});
  }
  return SubcarrierGrid(std::move(subs));
}

namespace {

std::vector<int> ht_ltf_indices() {
  std::vector<int> n;
  for (int i = -58; i <= -2; ++i) n.push_back(i);
  for (int i = 2; i <= 58; ++i) n.push_back(i);
  return n;
}

std::vector<int> l_ltf_indices() {
  // Legacy 52-tone preamble (+-1..+-26) repeated at -32 and +32 offsets.
  std::vector<int> n;
  for (int half : {-32, 32}) {
    for (int i = -26; i <= 26; ++i) {
      if (i != 0) n.push_back(half + i);
    }
  }
  return n;
}

}  // namespace

SubcarrierGrid SubcarrierGrid::ht_ltf_40mhz(double center_hz) {
  const auto n = ht_ltf_indices();
  return from_physical_indices(LtfField::ht_ltf, n, center_hz);
}

SubcarrierGrid SubcarrierGrid::l_ltf_40mhz(double center_hz) {
  const auto n = l_ltf_indices();
  return from_physical_indices(LtfField::l_ltf, n, center_hz);
}

SubcarrierGrid SubcarrierGrid::combined_40mhz(double center_hz) {
  auto subs = ht_ltf_40mhz(center_hz).subcarriers_;
  const auto legacy = l_ltf_40mhz(center_hz);
  subs.insert(subs.end(), legacy.subcarriers_.begin(), legacy.subcarriers_.end());
  return SubcarrierGrid(std::move(subs));
}

int SubcarrierGrid::physical_span() const {
  if (subcarriers_.empty()) return 0;
  auto [lo, hi] = std::minmax_element(
      subcarriers_.begin(), subcarriers_.end(),
      [](const Subcarrier& a, const Subcarrier& b) { return a.physical_index < b.physical_index; });
  return hi->physical_index - lo->physical_index;
}

}  // namespace subratio
