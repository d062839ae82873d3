#pragma once

#include <span>

#include "ngar/distance.hpp"
#include "ngar/graph.hpp"

namespace ngar {

// Sum of squared distances from `candidate` to every graph in `sample`.
double frechet_cost(const AttributedGraph& candidate, std::span<const AttributedGraph> sample,
                    const DistanceParams& params = {});

// Exact sample Frechet mean under identity correspondence. The squared distance
// decomposes per entry, so features are averaged and each adjacency slot takes
// the majority vote of the sample (ties resolve to no edge).
AttributedGraph frechet_mean_closed_form(std::span<const AttributedGraph> sample,
                                         const DistanceParams& params = {});

// Minimiser of frechet_cost over an explicit candidate list; ties go to the
// lowest candidate index.
AttributedGraph frechet_mean_bruteforce(std::span<const AttributedGraph> sample,
                                        std::span<const AttributedGraph> candidates,
                                        const DistanceParams& params = {});

// Mean squared distance of the sample to its closed-form Frechet mean.
double frechet_variation(std::span<const AttributedGraph> sample,
                         const DistanceParams& params = {});

}  // namespace ngar
