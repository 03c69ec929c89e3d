#pragma once

namespace lob {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace lob
