#pragma once

#include "ngar/graph.hpp"

namespace ngar {

// Delaunay topology of the rows of `points` (N x 2), by brute force over all
// triples: (i, j) is an edge iff some non-collinear triple containing both has
// an open circumdisk with no other point inside. Cocircular configurations
// therefore keep the edges of every valid triangulation, and fully collinear
// inputs (or N < 3) yield no edges.
Adjacency delaunay_adjacency(const Matrix& points);

}  // namespace ngar
