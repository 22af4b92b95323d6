#include <atomic>
#include <cstdlib>
#include <string>

#include "mhom/kernels.hpp"

namespace mhom::kernels {

namespace {

const KernelTable *initial() {
  const char *env = std::getenv("MEMBRANE_HOMOG_SIMD");
  if (env && std::string(env) == "scalar") return &scalar_table();
  if (const KernelTable *t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable *> &current() {
  static std::atomic<const KernelTable *> ptr{initial()};
  return ptr;
}

}  // namespace

const KernelTable &active() { return *current().load(std::memory_order_acquire); }

bool select(const std::string &name) {
  if (name == "scalar") {
    current().store(&scalar_table(), std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const KernelTable *t = avx2_table()) {
      current().store(t, std::memory_order_release);
      return true;
    }
  }
  return false;
}

}  // namespace mhom::kernels
