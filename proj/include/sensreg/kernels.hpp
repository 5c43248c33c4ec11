// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace sensreg::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Structure-of-arrays view of K measurements with their sensor's bias and position
/// gathered per row. Every span has the same length.
struct CompensationBatch {
  std::span<const double> range;
  std::span<const double> cos_az;
  std::span<const double> sin_az;
  std::span<const double> range_bias;
  std::span<const double> cos_bias;
  std::span<const double> sin_bias;
  std::span<const double> sensor_x;
  std::span<const double> sensor_y;
  double inv_lambda = 1.0;

  std::size_t size() const { return range.size(); }
};

/// g_k = (rho_k + drho) / lambda * (cos(phi_k + dphi), sin(phi_k + dphi)) + p, via the
/// angle-addition identity so no transcendental call is needed per row.
using CompensateFn = void (*)(const CompensationBatch& in, std::span<double> gx, std::span<double> gy);

/// sum_k |g_{k+1} - g_k - (t_{k+1} - t_k) v|^2 over k = 0..K-2.
using IncrementResidualFn = double (*)(std::span<const double> gx, std::span<const double> gy,
                                       std::span<const double> t, double vx, double vy);

struct KernelTable {
  Isa isa;
  CompensateFn compensate;
  IncrementResidualFn increment_residual_sq;
};

/// Table for `isa`, or nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

/// Best available variant. Set SENSREG_ISA=scalar in the environment to force the reference path.
const KernelTable& active();

std::vector<Isa> available();

namespace scalar {
void compensate(const CompensationBatch& in, std::span<double> gx, std::span<double> gy);
double increment_residual_sq(std::span<const double> gx, std::span<const double> gy, std::span<const double> t,
                             double vx, double vy);
}  // namespace scalar

#if defined(SENSREG_HAVE_AVX2)
namespace avx2 {
void compensate(const CompensationBatch& in, std::span<double> gx, std::span<double> gy);
double increment_residual_sq(std::span<const double> gx, std::span<const double> gy, std::span<const double> t,
                             double vx, double vy);
}  // namespace avx2
#endif

}  // namespace sensreg::kernels
