#pragma once

#include <cstddef>
#include <vector>

#include "consensus_lab/model.hpp"

namespace consensus_lab {

/// Support graph of a nonnegative square matrix: an edge u -> v wherever
/// Q(u, v) is exactly nonzero. No thresholding is applied.
struct ComponentStructure {
    /// Component id per node; ids are assigned in order of each component's
    /// smallest node index.
    std::vector<std::size_t> component_of;
    /// Nodes of each component, ascending.
    std::vector<std::vector<std::size_t>> components;
    /// Whether each component has no edge leaving it.
    std::vector<bool> terminal;

    std::size_t count() const { return components.size(); }
    /// Terminal components in id order.
    std::vector<std::vector<std::size_t>> terminal_components() const;
};

ComponentStructure strongly_connected_components(const Matrix& q);

bool is_irreducible(const Matrix& q);

/// gcd of cycle lengths inside the component (0 for a trivial component
/// without a self-loop).
std::size_t component_period(const Matrix& q, const std::vector<std::size_t>& nodes);

/// Nodes reachable from `start` (including itself).
std::vector<bool> reachable_from(const Matrix& q, std::size_t start);

/// Longest shortest-path length over ordered pairs; -1 if some pair is unreachable.
long max_shortest_path(const Matrix& q);

/// Sub-matrix on the given node set (rows and columns in the given order).
Matrix restrict_to(const Matrix& q, const std::vector<std::size_t>& nodes);

}  // namespace consensus_lab
