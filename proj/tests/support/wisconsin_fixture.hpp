#pragma once

// Deterministic stand-in for the UCI original breast cancer file, matching
// its exact shape: 699 rows of (id, nine 1..10 integer features, class in
// {2, 4}), 16 rows carrying a '?' in the bare-nuclei column, 458 benign /
// 241 malignant. Loading it therefore yields the canonical 683 usable rows.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "jarzmle/rng.hpp"

namespace jarzmle::testing {

inline void write_wisconsin_like_csv(const std::string& path,
                                     std::uint64_t seed = 0x57c5) {
  constexpr int kRows = 699;
  constexpr int kMalignant = 241;
  constexpr int kMissing = 16;

  RngStream rng(stream_key(seed, 0xda7a));
  const auto draw_feature = [&](double mean) {
    const double v = std::round(mean + 2.0 * rng.normal());
    return static_cast<int>(std::clamp(v, 1.0, 10.0));
  };

  struct Row {
    int features[9];
    int label;  // 2 benign, 4 malignant
    bool missing = false;
  };

  std::vector<Row> rows;
  rows.reserve(kRows);
  for (int i = 0; i < kRows; ++i) {
    Row row{};
    const bool malignant = i < kMalignant;
    row.label = malignant ? 4 : 2;
    // three weakly informative columns, the rest pure noise
    row.features[0] = draw_feature(malignant ? 4.5 : 3.0);
    row.features[1] = draw_feature(malignant ? 5.5 : 4.0);
    row.features[2] = draw_feature(malignant ? 3.5 : 5.0);
    for (int j = 3; j < 9; ++j) row.features[j] = draw_feature(4.0);
    rows.push_back(row);
  }
  // deterministic shuffle, then spread the missing marks
  for (std::size_t i = rows.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(rows[i - 1], rows[std::min(j, i - 1)]);
  }
  for (int m = 0; m < kMissing; ++m) {
    rows[static_cast<std::size_t>(m) * 43 + 7].missing = true;
  }

  std::ofstream out(path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << 1000000 + i;
    for (int j = 0; j < 9; ++j) {
      if (j == 6 && rows[i].missing) {
        out << ",?";
      } else {
        out << ',' << rows[i].features[j];
      }
    }
    out << ',' << rows[i].label << '\n';
  }
}

}  // namespace jarzmle::testing
