#pragma once

namespace votebound {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace votebound
