#pragma once

#include "mhfrac/geometry.hpp"

#include <vector>

namespace mhfrac {

/// Disks of common radius centered at discrete boundary points, split into classes of
/// pairwise disjoint disks.
struct Covering {
    std::vector<Point> centers;
    double radius = 0.0;
    double inradius = 0.0;
    /// Class of each disk; empty until colored.
    std::vector<int> colors;
    int class_count = 0;
};

/// Greedy covering with radius inradius * (1 + sqrt 2): while an occupied cell center is
/// uncovered, its nearest boundary point becomes a new center. Throws EmptyDomainError.
Covering build_covering(const DomainMask& mask);

/// Greedy coloring of the intersection graph (adjacent iff center distance < 2r).
Covering color_covering(Covering cov);

struct CoveringCheck {
    std::size_t uncovered_cells = 0;
    std::size_t overlapping_pairs = 0;  // same class, center distance < 2r
    double max_center_offset = 0.0;     // largest distance from a center to the boundary
    bool ok() const { return uncovered_cells == 0 && overlapping_pairs == 0; }
};

/// Exhaustive check of coverage (every occupied cell center strictly inside some disk)
/// and of disjointness within each class.
CoveringCheck verify_covering(const DomainMask& mask, const Covering& cov);

}  // namespace mhfrac
