#pragma once

namespace aquasem {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aquasem
