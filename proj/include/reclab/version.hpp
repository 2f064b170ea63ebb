#pragma once

namespace reclab {

inline constexpr const char* kArtifactName = "reclab";
inline constexpr const char* kArtifactVersion = "1.0.0";

}  // namespace reclab
