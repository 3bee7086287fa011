#pragma once

namespace tvar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tvar
