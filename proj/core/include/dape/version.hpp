#pragma once

namespace dape {

// Version of every JSON document the toolkit writes.
inline constexpr int kSchemaVersion = 1;

}  // namespace dape
