// Copyright 2026 The Flatlift Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "flatlift/core/error.hpp"
#include "flatlift/kernels/kernels.hpp"

namespace flatlift::kernels {

std::vector<std::int64_t> gaussian_taps_fixed(double sigma) {
  if (!(sigma > 0)) throw Error(ErrorKind::InvalidArgument, "gaussian sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<std::int64_t> taps(radius + 1);
  for (int i = 0; i <= radius; ++i) {
    taps[i] = std::llround(4096.0 * std::exp(-(i * i) / (2.0 * sigma * sigma)));
  }
  return taps;
}

std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0)) throw Error(ErrorKind::InvalidArgument, "gaussian sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(radius + 1);
  double total = 0;
  for (int i = 0; i <= radius; ++i) {
    taps[i] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += i == 0 ? taps[i] : 2 * taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

}  // namespace flatlift::kernels
