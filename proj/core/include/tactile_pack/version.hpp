#pragma once

namespace tactile_pack {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tactile_pack
