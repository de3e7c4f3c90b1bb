#pragma once

namespace smab {

inline constexpr const char* kVersion = "smab 0.1.0";

}  // namespace smab
