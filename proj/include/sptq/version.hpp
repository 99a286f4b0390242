#pragma once

namespace sptq {

inline constexpr const char* kVersion = "0.1.0";

}
