#pragma once

namespace odest {
inline constexpr const char* kVersion = "0.1.0";
}
