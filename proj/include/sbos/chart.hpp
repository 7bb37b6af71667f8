#pragma once

#include <string>
#include <vector>

#include "sbos/csv.hpp"

namespace sbos {

struct ChartOptions {
  int width = 720;
  int height = 480;
  // Plot log10 PFS instead of PCS, for eyeballing exponential decay.
  bool log_pfs = false;
  std::string title;
};

// Deterministic SVG 1.1: budget on x, PCS on y, one polyline per policy
// with +-1 stderr bars and a legend. Identical rows render identical bytes.
std::string render_chart(const std::vector<ResultRow>& rows,
                         const ChartOptions& options);

}  // namespace sbos
