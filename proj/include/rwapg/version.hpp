#pragma once

namespace rwapg {

inline constexpr const char* kVersion = "0.1.0";

// Version tag for on-disk trace/metadata formats produced by the experiment
// driver. Bump when the file layout changes incompatibly.
inline constexpr int kFileFormat = 1;

}  // namespace rwapg
