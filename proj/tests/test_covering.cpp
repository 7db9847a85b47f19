#include "mhfrac/covering.hpp"
#include "mhfrac/error.hpp"
#include "mhfrac/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace mhfrac;

namespace {

// Brute-force coverage and disjointness, independent of verify_covering.
void check_exhaustively(const DomainMask& mask, const Covering& cov) {
    for (int j = 0; j < mask.ny(); ++j) {
        for (int i = 0; i < mask.nx(); ++i) {
            if (!mask.occupied(i, j)) continue;
            const Point c = mask.cell_center(i, j);
            double best = std::numeric_limits<double>::infinity();
            for (const Point& z : cov.centers) best = std::min(best, norm(c - z));
            REQUIRE(best < cov.radius);
        }
    }
    REQUIRE(cov.colors.size() == cov.centers.size());
    for (std::size_t a = 0; a < cov.centers.size(); ++a)
        for (std::size_t b = a + 1; b < cov.centers.size(); ++b)
            if (cov.colors[a] == cov.colors[b]) REQUIRE(norm(cov.centers[a] - cov.centers[b]) >= 2.0 * cov.radius);
}

}  // namespace

TEST_CASE("one disk covers a disk") {
    const DomainMask m = rasterize(ShapeSpec::disk(1.0), 1.0 / 32);
    const Covering cov = color_covering(build_covering(m));
    CHECK(cov.centers.size() == 1);
    CHECK(cov.class_count == 1);
    CHECK(cov.radius == doctest::Approx(cov.inradius * (1.0 + std::sqrt(2.0))));
    CHECK(verify_covering(m, cov).ok());
}

TEST_CASE("thin strip is covered with few classes") {
    const DomainMask m = rasterize(ShapeSpec::rectangle(20.0, 1.0), 1.0 / 16);
    const Covering cov = color_covering(build_covering(m));
    const CoveringCheck check = verify_covering(m, cov);
    CHECK(check.uncovered_cells == 0);
    CHECK(check.overlapping_pairs == 0);
    CHECK(cov.class_count <= 36);
    CHECK(cov.centers.size() >= 10);
    check_exhaustively(m, cov);
}

TEST_CASE("coloring of hand-built coverings") {
    Covering single;
    single.radius = 1.0;
    single.centers = {{0.0, 0.0}};
    CHECK(color_covering(single).class_count == 1);

    Covering pair;
    pair.radius = 1.0;
    pair.centers = {{0.0, 0.0}, {1.5, 0.0}};
    const Covering colored = color_covering(pair);
    CHECK(colored.class_count == 2);
    CHECK(colored.colors[0] != colored.colors[1]);

    Covering apart;
    apart.radius = 1.0;
    apart.centers = {{0.0, 0.0}, {2.5, 0.0}};
    CHECK(color_covering(apart).class_count == 1);

    // tangent disks share no interior point
    Covering tangent;
    tangent.radius = 1.0;
    tangent.centers = {{0.0, 0.0}, {2.0, 0.0}};
    CHECK(color_covering(tangent).class_count == 1);
}

TEST_CASE("verify_covering detects defects") {
    const DomainMask m = rasterize(ShapeSpec::rectangle(6.0, 1.0), 1.0 / 16);
    Covering cov = color_covering(build_covering(m));
    REQUIRE(cov.centers.size() > 1);
    Covering dropped = cov;
    dropped.centers.pop_back();
    dropped.colors.pop_back();
    CHECK(verify_covering(m, dropped).uncovered_cells > 0);
    Covering merged = cov;
    std::fill(merged.colors.begin(), merged.colors.end(), 0);
    CHECK(verify_covering(m, merged).overlapping_pairs > 0);
}

TEST_CASE("zoo coverings are complete and centered on the boundary") {
    const double h = 1.0 / 32;
    for (const ShapeSpec& spec : {ShapeSpec::disk(1.0), ShapeSpec::square(2.0), ShapeSpec::rectangle(2.0, 1.0),
                                  ShapeSpec::l_shape(2.0), ShapeSpec::spiral(1.0, 0.5, 2.5),
                                  ShapeSpec::cracked_square(2), ShapeSpec::cracked_square(3),
                                  ShapeSpec::cracked_square(4)}) {
        CAPTURE(spec.label());
        const DomainMask m = rasterize(spec, h);
        const Covering cov = color_covering(build_covering(m));
        const CoveringCheck check = verify_covering(m, cov);
        CHECK(check.ok());
        CHECK(check.max_center_offset <= h);
        CHECK(cov.class_count <= 36);
        for (const Point& z : cov.centers) CHECK(distance_to_boundary(m, z) <= h);
        check_exhaustively(m, cov);
    }
}

TEST_CASE("empty mask throws") {
    const DomainMask m(0.1, {0.0, 0.0}, 4, 4, std::vector<std::uint8_t>(16, 0));
    CHECK_THROWS_AS(build_covering(m), EmptyDomainError);
}
