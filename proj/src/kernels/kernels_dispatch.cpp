#include <cstdlib>

#include "opstat/kernels.hpp"

namespace opstat::kern {
namespace {

bool avx2_available() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Ops* table_for(std::string_view name) {
  if (name == "scalar") return &detail::scalar_ops;
#if defined(__x86_64__)
  if (name == "avx2" && avx2_available()) return &detail::avx2_ops;
#endif
  return nullptr;
}

struct Lane {
  const Ops* table;
  std::string_view name;
};

Lane pick_initial() {
  if (const char* env = std::getenv("OPSTAT_KERNEL_LANE")) {
    if (const Ops* t = table_for(env)) return {t, t == &detail::scalar_ops ? "scalar" : "avx2"};
  }
#if defined(__x86_64__)
  if (avx2_available()) return {&detail::avx2_ops, "avx2"};
#endif
  return {&detail::scalar_ops, "scalar"};
}

Lane& active() {
  static Lane lane = pick_initial();
  return lane;
}

}  // namespace

const Ops& ops() { return *active().table; }

std::string_view active_lane() { return active().name; }

std::vector<std::string_view> available_lanes() {
  std::vector<std::string_view> lanes{"scalar"};
  if (avx2_available()) lanes.push_back("avx2");
  return lanes;
}

bool set_lane(std::string_view name) {
  const Ops* t = table_for(name);
  if (!t) return false;
  active() = {t, t == &detail::scalar_ops ? "scalar" : "avx2"};
  return true;
}

}  // namespace opstat::kern
