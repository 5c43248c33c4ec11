// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string_view>

#include "sensreg/kernels.hpp"

namespace sensreg::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::compensate, &scalar::increment_residual_sq};

#if defined(SENSREG_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::compensate, &avx2::increment_residual_sq};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select() {
  if (const char* env = std::getenv("SENSREG_ISA"); env != nullptr && std::string_view(env) == "scalar") {
    return kScalar;
  }
  if (const KernelTable* t = table_for(Isa::avx2)) return *t;
  return kScalar;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
#if defined(SENSREG_HAVE_AVX2)
      if (cpu_has_avx2()) return &kAvx2;
#endif
      return nullptr;
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::vector<Isa> available() {
  std::vector<Isa> out{Isa::scalar};
  if (table_for(Isa::avx2) != nullptr) out.push_back(Isa::avx2);
  return out;
}

}  // namespace sensreg::kernels
