#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "csbench/error.hpp"
#include "csbench/image.hpp"

namespace csbench {

enum class RunningProcess { iterative, end_to_end };
enum class Platform { cpu, gpu };

struct MethodDescriptor {
  std::string_view name;
  std::string_view display_name;
  bool data_dependent;
  RunningProcess running_process;
  Platform platform;
  bool executable;
};

/// The ten reconstruction methods of the benchmark. Only the model-based TV
/// and message-passing solvers run here; the others exist so their published
/// results can be scored.
inline constexpr std::array<MethodDescriptor, 10> kMethods{{
    {"l1", "L1", false, RunningProcess::iterative, Platform::cpu, true},
    {"tval3", "TVAL-3", false, RunningProcess::iterative, Platform::cpu, true},
    {"nlrcs", "NLR-CS", false, RunningProcess::iterative, Platform::cpu, false},
    {"damp", "D-AMP", false, RunningProcess::iterative, Platform::cpu, true},
    {"reconnet", "ReconNet", true, RunningProcess::end_to_end, Platform::gpu, false},
    {"istanet", "ISTA-Net", true, RunningProcess::end_to_end, Platform::gpu, false},
    {"ldamp", "LDAMP", true, RunningProcess::end_to_end, Platform::gpu, false},
    {"csgm", "CSGM", true, RunningProcess::iterative, Platform::gpu, false},
    {"lapran", "LAPRAN", true, RunningProcess::end_to_end, Platform::gpu, false},
    {"csgan", "CSGAN", true, RunningProcess::iterative, Platform::gpu, false},
}};

/// Case- and punctuation-insensitive lookup: "TVAL-3", "tval3" and "Tval 3" all match.
inline std::optional<MethodDescriptor> find_method(std::string_view name) {
  const std::string key = detail::alnum_lower(name);
  for (const auto& m : kMethods) {
    if (m.name == key) return m;
  }
  return std::nullopt;
}

inline MethodDescriptor require_method(std::string_view name) {
  const auto m = find_method(name);
  if (!m) throw RegistryError("unknown reconstruction method '" + std::string(name) + "'");
  return *m;
}

inline std::string_view to_string(RunningProcess p) { return p == RunningProcess::iterative ? "iterative" : "end-to-end"; }
inline std::string_view to_string(Platform p) { return p == Platform::cpu ? "cpu" : "gpu"; }

}  // namespace csbench
