#pragma once

namespace pnqs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pnqs
