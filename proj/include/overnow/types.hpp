#pragma once

#include <cstdint>

namespace overnow {

// Vertices of the maintained multigraph. Cluster ids are overlay vertices.
using VertexId = std::uint32_t;
using ClusterId = VertexId;

// Node identities are opaque unique tokens handed out by the harness.
// Honesty ground truth lives in the corruption ledger, never on the id.
using NodeId = std::uint32_t;

}  // namespace overnow
