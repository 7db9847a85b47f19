#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mhfrac {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double t, Point p) { return {t * p.x, t * p.y}; }
    friend bool operator==(const Point&, const Point&) = default;
};

double norm(Point p);
double dot(Point a, Point b);
double cross(Point a, Point b);

/// Closed line segment of zero thickness.
struct Segment {
    Point a;
    Point b;
    friend bool operator==(const Segment&, const Segment&) = default;
};

double distance(Point p, const Segment& seg);

/// Axis-aligned closed rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
    Point lo;
    Point hi;
};

double distance(Point p, const Box& box);

enum class ShapeKind { disk, square, rectangle, l_shape, spiral, cracked_square, polygon, annulus };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& name);

/// Parameters of one of the built-in test shapes. All shapes are centered at the origin
/// except polygons, which use their own vertex coordinates.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::disk;
    double radius = 1.0;        // disk, annulus (outer)
    double inner_radius = 0.4;  // annulus
    double side = 2.0;          // square, L-shape
    double width = 2.0;         // rectangle
    double height = 1.0;        // rectangle
    int k = 2;                  // cracked square (-k, k)^2
    double pitch = 1.0;         // spiral: radial growth per turn
    double wall = 0.5;          // spiral: band width
    double turns = 2.5;         // spiral: number of turns
    std::vector<Point> vertices;  // polygon

    static ShapeSpec disk(double radius);
    static ShapeSpec square(double side);
    static ShapeSpec rectangle(double width, double height);
    static ShapeSpec l_shape(double side);
    static ShapeSpec spiral(double pitch, double wall, double turns);
    static ShapeSpec cracked_square(int k);
    static ShapeSpec polygon(std::vector<Point> vertices);
    static ShapeSpec annulus(double outer, double inner);

    /// Throws InvalidSpecError for degenerate parameters.
    void validate() const;
    /// Smallest geometric length scale the raster must resolve.
    double min_feature() const;
    Box bounding_box() const;
    /// Exact membership test for the open shape (obstacles excluded from consideration).
    bool contains(Point p) const;
    /// Zero-width obstacles carried by the shape (the slits of the cracked square).
    std::vector<Segment> obstacles() const;
    /// Short label such as "disk(r=1)".
    std::string label() const;
};

/// Rasterized planar domain: a uniform grid of square cells of side h whose lower-left
/// corner is `origin`, an occupancy flag per cell, and optional zero-width obstacle
/// segments which the domain functions must vanish on.
class DomainMask {
public:
    DomainMask(double h, Point origin, int nx, int ny, std::vector<std::uint8_t> cells,
               std::vector<Segment> segments = {});

    double h() const { return h_; }
    Point origin() const { return origin_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const std::vector<std::uint8_t>& cells() const { return cells_; }
    const std::vector<Segment>& segments() const { return segments_; }

    /// False for indices outside the grid.
    bool occupied(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return false;
        return cells_[static_cast<std::size_t>(j) * nx_ + i] != 0;
    }
    Point cell_center(int i, int j) const {
        return {origin_.x + (i + 0.5) * h_, origin_.y + (j + 0.5) * h_};
    }
    Box cell_box(int i, int j) const {
        return {{origin_.x + i * h_, origin_.y + j * h_}, {origin_.x + (i + 1) * h_, origin_.y + (j + 1) * h_}};
    }
    /// Grid node (cell corner) position, 0 <= i <= nx, 0 <= j <= ny.
    Point node(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
    Box bounding_box() const { return {origin_, {origin_.x + nx_ * h_, origin_.y + ny_ * h_}}; }

    std::size_t occupied_count() const;
    double occupied_area() const { return static_cast<double>(occupied_count()) * h_ * h_; }
    bool empty() const { return occupied_count() == 0; }

    /// Cell containing p, or {-1, -1} when p lies outside the grid.
    std::pair<int, int> locate(Point p) const;
    /// True when p lies in an occupied cell (closed cells, obstacles ignored).
    bool contains(Point p) const;

    friend bool operator==(const DomainMask&, const DomainMask&) = default;

private:
    double h_;
    Point origin_;
    int nx_;
    int ny_;
    std::vector<std::uint8_t> cells_;
    std::vector<Segment> segments_;
};

/// Cells are occupied when their centers lie inside the shape; obstacle segments are
/// carried over unchanged. One empty cell of padding surrounds the shape.
DomainMask rasterize(const ShapeSpec& spec, double h);

struct InscribedDisk {
    Point center;
    double radius = 0.0;
};

/// Largest distance from an occupied cell center to the complement of the occupied
/// region or to an obstacle segment, with the maximizing center.
InscribedDisk largest_inscribed_disk(const DomainMask& mask);
double inradius(const DomainMask& mask);

/// Distance from p to the nearest point of (complement of occupied cells) union obstacles.
/// Builds a bucketed index of the boundary once; queries are cheap.
class BoundaryDistance {
public:
    explicit BoundaryDistance(const DomainMask& mask);
    double operator()(Point p) const;

private:
    struct Bucket {
        std::vector<Box> boxes;
        std::vector<std::size_t> segments;
    };
    double h_;
    Point origin_;
    int bucket_cells_;
    int bx_;
    int by_;
    std::vector<Bucket> buckets_;
    std::vector<Segment> segments_;
    bool has_items_ = false;
};

double distance_to_boundary(const DomainMask& mask, Point p);

/// Occupied region connected (4-neighbour moves not crossing an obstacle) and its
/// complement, augmented by the obstacles, connected (8-neighbour moves within a
/// one-cell padded box).
bool is_simply_connected(const DomainMask& mask);

/// Multiply every length (h, origin, segments) by t > 0.
DomainMask scale(const DomainMask& mask, double t);

/// Split every cell into factor x factor cells with the same occupancy.
DomainMask refine(const DomainMask& mask, int factor);

/// Centers of unoccupied cells touching occupied ones plus samples on the obstacles.
std::vector<Point> boundary_points(const DomainMask& mask);

/// True when the open segment p-q and the obstacle share a point, or overlap collinearly
/// with positive length.
bool blocks(const Segment& obstacle, Point p, Point q);

/// True when the obstacle meets the open interior of the box.
bool intersects_open(const Segment& obstacle, const Box& box);

}  // namespace mhfrac
