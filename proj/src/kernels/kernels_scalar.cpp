// SPDX-License-Identifier: Apache-2.0

#include "sensreg/kernels.hpp"

namespace sensreg::kernels::scalar {

void compensate(const CompensationBatch& in, std::span<double> gx, std::span<double> gy) {
  const std::size_t n = in.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double r = (in.range[k] + in.range_bias[k]) * in.inv_lambda;
    const double c = in.cos_az[k] * in.cos_bias[k] - in.sin_az[k] * in.sin_bias[k];
    const double s = in.sin_az[k] * in.cos_bias[k] + in.cos_az[k] * in.sin_bias[k];
    gx[k] = r * c + in.sensor_x[k];
    gy[k] = r * s + in.sensor_y[k];
  }
}

double increment_residual_sq(std::span<const double> gx, std::span<const double> gy, std::span<const double> t,
                             double vx, double vy) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < gx.size(); ++k) {
    const double T = t[k + 1] - t[k];
    const double ex = gx[k + 1] - gx[k] - T * vx;
    const double ey = gy[k + 1] - gy[k] - T * vy;
    acc += ex * ex + ey * ey;
  }
  return acc;
}

}  // namespace sensreg::kernels::scalar
