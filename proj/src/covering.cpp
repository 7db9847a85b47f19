#include "mhfrac/covering.hpp"

#include "mhfrac/error.hpp"

#include <cmath>
#include <limits>

namespace mhfrac {

Covering build_covering(const DomainMask& mask) {
    if (mask.empty()) throw EmptyDomainError("build_covering: empty domain");
    Covering cov;
    cov.inradius = inradius(mask);
    cov.radius = cov.inradius * (1.0 + std::sqrt(2.0));
    const std::vector<Point> boundary = boundary_points(mask);
    if (boundary.empty()) throw EmptyDomainError("build_covering: domain has no boundary points");

    const double h = mask.h();
    const double r2 = cov.radius * cov.radius;
    std::vector<std::uint8_t> covered(static_cast<std::size_t>(mask.nx()) * mask.ny(), 0);
    const auto mark = [&](Point c) {
        const int i0 = std::max(0, static_cast<int>(std::floor((c.x - cov.radius - mask.origin().x) / h)));
        const int i1 = std::min(mask.nx() - 1, static_cast<int>(std::ceil((c.x + cov.radius - mask.origin().x) / h)));
        const int j0 = std::max(0, static_cast<int>(std::floor((c.y - cov.radius - mask.origin().y) / h)));
        const int j1 = std::min(mask.ny() - 1, static_cast<int>(std::ceil((c.y + cov.radius - mask.origin().y) / h)));
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const Point p = mask.cell_center(i, j);
                const double dx = p.x - c.x;
                const double dy = p.y - c.y;
                if (dx * dx + dy * dy < r2) covered[static_cast<std::size_t>(j) * mask.nx() + i] = 1;
            }
        }
    };
    for (int j = 0; j < mask.ny(); ++j) {
        for (int i = 0; i < mask.nx(); ++i) {
            if (!mask.occupied(i, j) || covered[static_cast<std::size_t>(j) * mask.nx() + i]) continue;
            const Point p = mask.cell_center(i, j);
            double best = std::numeric_limits<double>::infinity();
            Point center = boundary.front();
            for (const Point& b : boundary) {
                const double d = norm(b - p);
                if (d < best) {
                    best = d;
                    center = b;
                }
            }
            cov.centers.push_back(center);
            mark(center);
        }
    }
    return cov;
}

Covering color_covering(Covering cov) {
    const std::size_t n = cov.centers.size();
    cov.colors.assign(n, -1);
    cov.class_count = 0;
    const double reach = 2.0 * cov.radius;
    std::vector<char> taken;
    for (std::size_t a = 0; a < n; ++a) {
        taken.assign(static_cast<std::size_t>(cov.class_count) + 1, 0);
        for (std::size_t b = 0; b < a; ++b)
            if (norm(cov.centers[a] - cov.centers[b]) < reach) taken[static_cast<std::size_t>(cov.colors[b])] = 1;
        int c = 0;
        while (taken[static_cast<std::size_t>(c)]) ++c;
        cov.colors[a] = c;
        cov.class_count = std::max(cov.class_count, c + 1);
    }
    return cov;
}

CoveringCheck verify_covering(const DomainMask& mask, const Covering& cov) {
    CoveringCheck check;
    const double r2 = cov.radius * cov.radius;
    for (int j = 0; j < mask.ny(); ++j) {
        for (int i = 0; i < mask.nx(); ++i) {
            if (!mask.occupied(i, j)) continue;
            const Point p = mask.cell_center(i, j);
            bool inside = false;
            for (const Point& c : cov.centers) {
                const double dx = p.x - c.x;
                const double dy = p.y - c.y;
                if (dx * dx + dy * dy < r2) {
                    inside = true;
                    break;
                }
            }
            if (!inside) ++check.uncovered_cells;
        }
    }
    if (cov.colors.size() == cov.centers.size()) {
        for (std::size_t a = 0; a < cov.centers.size(); ++a)
            for (std::size_t b = a + 1; b < cov.centers.size(); ++b)
                if (cov.colors[a] == cov.colors[b] && norm(cov.centers[a] - cov.centers[b]) < 2.0 * cov.radius)
                    ++check.overlapping_pairs;
    }
    const BoundaryDistance dist(mask);
    for (const Point& c : cov.centers) {
        // a center lies in the complement or on an obstacle; measure its distance to the occupied region
        const auto [i, j] = mask.locate(c);
        double offset = 0.0;
        if (i >= 0 && mask.occupied(i, j)) offset = dist(c);
        else {
            double best = std::numeric_limits<double>::infinity();
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if (mask.occupied(i + di, j + dj)) best = std::min(best, distance(c, mask.cell_box(i + di, j + dj)));
            offset = std::isfinite(best) ? best : 0.0;
        }
        check.max_center_offset = std::max(check.max_center_offset, offset);
    }
    return check;
}

}  // namespace mhfrac
