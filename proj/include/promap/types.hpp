// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace promap {

using VertexId = std::int32_t;
using EdgeId = std::int64_t;
using BlockId = std::int32_t;
/// Vertex and edge weights. Sums are kept in the same 64-bit type.
using Weight = std::int64_t;
/// Communication cost J and gains.
using Cost = std::int64_t;

inline constexpr VertexId kInvalidVertex = -1;
inline constexpr BlockId kInvalidBlock = -1;

}  // namespace promap
