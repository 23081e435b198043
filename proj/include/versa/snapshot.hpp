#pragma once

#include "versa/kb.hpp"

#include <filesystem>
#include <string>

namespace versa {

inline constexpr int kSnapshotVersion = 1;

/// Serializes basic facts, statics, cached facts, the cache's threshold and
/// functor set, and the processed range. Identical stores produce identical
/// bytes.
std::string save_snapshot(const FactStore& store);
FactStore load_snapshot(std::string_view text);

void write_snapshot(const FactStore& store, const std::filesystem::path& path);
FactStore read_snapshot(const std::filesystem::path& path);

}  // namespace versa
