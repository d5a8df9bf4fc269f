#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairmtl {

// The classification tasks: five binary properties of a text plus the
// dialect auxiliary task.
enum class AspectId : std::uint8_t {
  kOffensive = 0,
  kIntent = 1,
  kLewd = 2,
  kTargetGroup = 3,
  kIngroup = 4,
  kDialect = 5,
};

inline constexpr std::size_t kAspectCount = 6;

inline constexpr std::array<AspectId, kAspectCount> kAllAspects = {
    AspectId::kOffensive, AspectId::kIntent,  AspectId::kLewd,
    AspectId::kTargetGroup, AspectId::kIngroup, AspectId::kDialect,
};

// The five bias aspects, excluding the dialect auxiliary task.
inline constexpr std::array<AspectId, 5> kBiasAspects = {
    AspectId::kOffensive, AspectId::kIntent, AspectId::kLewd,
    AspectId::kTargetGroup, AspectId::kIngroup,
};

// Names match the corpus JSONL label keys.
inline constexpr std::string_view aspect_name(AspectId a) {
  switch (a) {
    case AspectId::kOffensive:   return "offensive";
    case AspectId::kIntent:      return "intent";
    case AspectId::kLewd:        return "lewd";
    case AspectId::kTargetGroup: return "group";
    case AspectId::kIngroup:     return "ingroup";
    case AspectId::kDialect:     return "dialect";
  }
  return "?";
}

inline std::optional<AspectId> parse_aspect(std::string_view name) {
  for (AspectId a : kAllAspects) {
    if (aspect_name(a) == name) return a;
  }
  return std::nullopt;
}

inline AspectId parse_aspect_or_throw(std::string_view name) {
  if (auto a = parse_aspect(name)) return *a;
  throw std::invalid_argument("unknown aspect: " + std::string(name));
}

}  // namespace fairmtl
