#pragma once

#include <string>

#include "vigil/types.hpp"

namespace vigil {

// Supported snapshot schema; loading anything newer fails loudly.
inline constexpr int kSnapshotSchemaVersion = 1;

// JSON snapshot of a GlobalState. Doubles round-trip losslessly, so
// load(save(s)) reproduces s field for field.
std::string save_snapshot(const GlobalState& state);
GlobalState load_snapshot(const std::string& json_text);

void save_snapshot_file(const std::string& path, const GlobalState& state);
GlobalState load_snapshot_file(const std::string& path);

}  // namespace vigil
