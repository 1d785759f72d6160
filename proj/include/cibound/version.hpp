#pragma once

#include <string_view>

namespace cibound {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace cibound
