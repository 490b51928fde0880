#pragma once

namespace nessxy {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nessxy
