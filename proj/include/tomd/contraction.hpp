#pragma once

// Tensor network contraction: the sum over every shared (bond) index of the
// product of the node entries, leaving the open indexes in a caller-chosen
// order.

#include <cstddef>
#include <span>
#include <vector>

#include "tomd/tensor.hpp"

namespace tomd {

struct AxisRef {
  std::size_t node = 0;
  std::size_t axis = 0;
  friend bool operator==(const AxisRef&, const AxisRef&) = default;
};

struct Edge {
  AxisRef a;
  AxisRef b;
};

struct ContractionNetwork {
  std::vector<Tensor> nodes;
  std::vector<Edge> edges;
  std::vector<AxisRef> open_axes;  // output mode order
};

enum class Schedule {
  greedy,      // repeatedly contract the pair with the smallest intermediate
  sequential,  // fold nodes left to right into an accumulator
};

// Throws NetworkError for dangling or doubly-used axes, ShapeError for
// mismatched bond extents.
void validate(const ContractionNetwork& net);

// A network with no open axes contracts to a 1-element tensor of shape (1).
Tensor contract(const ContractionNetwork& net, Schedule schedule = Schedule::greedy);

// Builds a network from integer axis labels: a label used twice is a bond, a
// label used once is open and must appear in `output`.
ContractionNetwork network_from_labels(std::vector<Tensor> nodes,
                                       const std::vector<std::vector<int>>& labels,
                                       std::span<const int> output);

}  // namespace tomd
