#include "mhfrac/geometry.hpp"

#include "mhfrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <sstream>

namespace mhfrac {

double norm(Point p) { return std::hypot(p.x, p.y); }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

double distance(Point p, const Segment& seg) {
    const Point d = seg.b - seg.a;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return norm(p - seg.a);
    const double t = std::clamp(dot(p - seg.a, d) / len2, 0.0, 1.0);
    return norm(p - (seg.a + t * d));
}

double distance(Point p, const Box& box) {
    const double dx = std::max({box.lo.x - p.x, 0.0, p.x - box.hi.x});
    const double dy = std::max({box.lo.y - p.y, 0.0, p.y - box.hi.y});
    return std::hypot(dx, dy);
}

namespace {

// Liang-Barsky clip of segment a-b against [lo, hi]; true when a nonempty piece survives.
bool clip_segment(Point a, Point b, Point lo, Point hi) {
    double t0 = 0.0;
    double t1 = 1.0;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - lo.x, hi.x - a.x, a.y - lo.y, hi.y - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return false;
        } else {
            const double r = q[k] / p[k];
            if (p[k] < 0.0) {
                t0 = std::max(t0, r);
            } else {
                t1 = std::min(t1, r);
            }
        }
    }
    return t0 <= t1;
}

bool point_in_polygon(Point p, const std::vector<Point>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

bool segments_cross(Point a, Point b, Point c, Point d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

double spiral_start_angle() { return 2.0 * std::numbers::pi; }

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::disk: return "disk";
        case ShapeKind::square: return "square";
        case ShapeKind::rectangle: return "rectangle";
        case ShapeKind::l_shape: return "l-shape";
        case ShapeKind::spiral: return "spiral";
        case ShapeKind::cracked_square: return "cracked-square";
        case ShapeKind::polygon: return "polygon";
        case ShapeKind::annulus: return "annulus";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& name) {
    std::string n = name;
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    std::replace(n.begin(), n.end(), '_', '-');
    if (n == "disk") return ShapeKind::disk;
    if (n == "square") return ShapeKind::square;
    if (n == "rectangle") return ShapeKind::rectangle;
    if (n == "l-shape" || n == "lshape") return ShapeKind::l_shape;
    if (n == "spiral") return ShapeKind::spiral;
    if (n == "cracked-square" || n == "cracked") return ShapeKind::cracked_square;
    if (n == "polygon") return ShapeKind::polygon;
    if (n == "annulus") return ShapeKind::annulus;
    throw InvalidSpecError("unknown shape tag '" + name + "'");
}

ShapeSpec ShapeSpec::disk(double radius) {
    ShapeSpec s;
    s.kind = ShapeKind::disk;
    s.radius = radius;
    return s;
}

ShapeSpec ShapeSpec::square(double side) {
    ShapeSpec s;
    s.kind = ShapeKind::square;
    s.side = side;
    return s;
}

ShapeSpec ShapeSpec::rectangle(double width, double height) {
    ShapeSpec s;
    s.kind = ShapeKind::rectangle;
    s.width = width;
    s.height = height;
    return s;
}

ShapeSpec ShapeSpec::l_shape(double side) {
    ShapeSpec s;
    s.kind = ShapeKind::l_shape;
    s.side = side;
    return s;
}

ShapeSpec ShapeSpec::spiral(double pitch, double wall, double turns) {
    ShapeSpec s;
    s.kind = ShapeKind::spiral;
    s.pitch = pitch;
    s.wall = wall;
    s.turns = turns;
    return s;
}

ShapeSpec ShapeSpec::cracked_square(int k) {
    ShapeSpec s;
    s.kind = ShapeKind::cracked_square;
    s.k = k;
    return s;
}

ShapeSpec ShapeSpec::polygon(std::vector<Point> vertices) {
    ShapeSpec s;
    s.kind = ShapeKind::polygon;
    s.vertices = std::move(vertices);
    return s;
}

ShapeSpec ShapeSpec::annulus(double outer, double inner) {
    ShapeSpec s;
    s.kind = ShapeKind::annulus;
    s.radius = outer;
    s.inner_radius = inner;
    return s;
}

void ShapeSpec::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidSpecError(std::string(what) + " must be positive");
    };
    switch (kind) {
        case ShapeKind::disk: positive(radius, "disk radius"); break;
        case ShapeKind::square:
        case ShapeKind::l_shape: positive(side, "side"); break;
        case ShapeKind::rectangle:
            positive(width, "rectangle width");
            positive(height, "rectangle height");
            break;
        case ShapeKind::spiral:
            positive(pitch, "spiral pitch");
            positive(wall, "spiral wall");
            positive(turns, "spiral turns");
            if (wall >= pitch) throw InvalidSpecError("spiral wall must be narrower than the pitch");
            break;
        case ShapeKind::cracked_square:
            if (k < 2) throw InvalidSpecError("cracked square needs k >= 2");
            break;
        case ShapeKind::annulus:
            positive(radius, "annulus outer radius");
            positive(inner_radius, "annulus inner radius");
            if (inner_radius >= radius) throw InvalidSpecError("annulus inner radius must be below the outer");
            break;
        case ShapeKind::polygon: {
            const std::size_t n = vertices.size();
            if (n < 3) throw InvalidSpecError("polygon needs at least 3 vertices");
            for (std::size_t i = 0; i < n; ++i) {
                if (norm(vertices[(i + 1) % n] - vertices[i]) == 0.0)
                    throw InvalidSpecError("polygon has a zero-length edge");
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 2; j < n; ++j) {
                    if (i == 0 && j == n - 1) continue;
                    if (segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]))
                        throw InvalidSpecError("polygon is self-intersecting");
                }
            }
            double area = 0.0;
            for (std::size_t i = 0; i < n; ++i) area += cross(vertices[i], vertices[(i + 1) % n]);
            if (std::abs(area) == 0.0) throw InvalidSpecError("polygon has zero area");
            break;
        }
    }
}

double ShapeSpec::min_feature() const {
    switch (kind) {
        case ShapeKind::disk: return radius;
        case ShapeKind::square: return side;
        case ShapeKind::rectangle: return std::min(width, height);
        case ShapeKind::l_shape: return 0.5 * side;
        case ShapeKind::spiral: return std::min(wall, pitch - wall);
        case ShapeKind::cracked_square: return 1.0;
        case ShapeKind::annulus: return std::min(inner_radius, radius - inner_radius);
        case ShapeKind::polygon: {
            double m = std::numeric_limits<double>::infinity();
            const std::size_t n = vertices.size();
            for (std::size_t i = 0; i < n; ++i) m = std::min(m, norm(vertices[(i + 1) % n] - vertices[i]));
            return m;
        }
    }
    return 0.0;
}

Box ShapeSpec::bounding_box() const {
    switch (kind) {
        case ShapeKind::disk:
        case ShapeKind::annulus: return {{-radius, -radius}, {radius, radius}};
        case ShapeKind::square:
        case ShapeKind::l_shape: return {{-0.5 * side, -0.5 * side}, {0.5 * side, 0.5 * side}};
        case ShapeKind::rectangle: return {{-0.5 * width, -0.5 * height}, {0.5 * width, 0.5 * height}};
        case ShapeKind::cracked_square: return {{-double(k), -double(k)}, {double(k), double(k)}};
        case ShapeKind::spiral: {
            const double rmax = pitch * (1.0 + turns) + 0.5 * wall;
            return {{-rmax, -rmax}, {rmax, rmax}};
        }
        case ShapeKind::polygon: {
            Box b{vertices.front(), vertices.front()};
            for (const Point& v : vertices) {
                b.lo.x = std::min(b.lo.x, v.x);
                b.lo.y = std::min(b.lo.y, v.y);
                b.hi.x = std::max(b.hi.x, v.x);
                b.hi.y = std::max(b.hi.y, v.y);
            }
            return b;
        }
    }
    return {};
}

bool ShapeSpec::contains(Point p) const {
    switch (kind) {
        case ShapeKind::disk: return norm(p) < radius;
        case ShapeKind::annulus: {
            const double r = norm(p);
            return r < radius && r > inner_radius;
        }
        case ShapeKind::square: return std::abs(p.x) < 0.5 * side && std::abs(p.y) < 0.5 * side;
        case ShapeKind::rectangle: return std::abs(p.x) < 0.5 * width && std::abs(p.y) < 0.5 * height;
        case ShapeKind::l_shape:
            return std::abs(p.x) < 0.5 * side && std::abs(p.y) < 0.5 * side && !(p.x >= 0.0 && p.y >= 0.0);
        case ShapeKind::cracked_square: return std::abs(p.x) < k && std::abs(p.y) < k;
        case ShapeKind::polygon: return point_in_polygon(p, vertices);
        case ShapeKind::spiral: {
            // centerline r = pitch * theta / (2 pi) for theta in [2 pi, 2 pi (1 + turns)]
            const double r = norm(p);
            double phi = std::atan2(p.y, p.x);
            if (phi < 0.0) phi += 2.0 * std::numbers::pi;
            const double theta_lo = spiral_start_angle();
            const double theta_hi = theta_lo + 2.0 * std::numbers::pi * turns;
            for (double theta = phi; theta <= theta_hi; theta += 2.0 * std::numbers::pi) {
                if (theta < theta_lo) continue;
                const double rc = pitch * theta / (2.0 * std::numbers::pi);
                if (std::abs(r - rc) < 0.5 * wall) return true;
            }
            return false;
        }
    }
    return false;
}

std::vector<Segment> ShapeSpec::obstacles() const {
    std::vector<Segment> out;
    if (kind == ShapeKind::cracked_square) {
        const double kk = k;
        for (int i = -(k - 1); i <= k - 1; ++i) {
            out.push_back({{-kk, double(i)}, {-1.0, double(i)}});
            out.push_back({{1.0, double(i)}, {kk, double(i)}});
        }
    }
    return out;
}

std::string ShapeSpec::label() const {
    std::ostringstream os;
    os << to_string(kind) << "(";
    switch (kind) {
        case ShapeKind::disk: os << "r=" << radius; break;
        case ShapeKind::annulus: os << "r=" << radius << ",inner=" << inner_radius; break;
        case ShapeKind::square:
        case ShapeKind::l_shape: os << "side=" << side; break;
        case ShapeKind::rectangle: os << width << "x" << height; break;
        case ShapeKind::cracked_square: os << "k=" << k; break;
        case ShapeKind::spiral: os << "pitch=" << pitch << ",wall=" << wall << ",turns=" << turns; break;
        case ShapeKind::polygon: os << vertices.size() << " vertices"; break;
    }
    os << ")";
    return os.str();
}

DomainMask::DomainMask(double h, Point origin, int nx, int ny, std::vector<std::uint8_t> cells,
                       std::vector<Segment> segments)
    : h_(h), origin_(origin), nx_(nx), ny_(ny), cells_(std::move(cells)), segments_(std::move(segments)) {
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw DomainError("grid spacing must be positive");
    if (nx_ <= 0 || ny_ <= 0) throw DomainError("occupancy grid must be nonempty");
    if (cells_.size() != static_cast<std::size_t>(nx_) * ny_) throw DimensionError("occupancy size mismatch");
    const Box bb = bounding_box();
    const double tol = 1e-9 * h_;
    for (const Segment& s : segments_) {
        for (Point p : {s.a, s.b}) {
            if (p.x < bb.lo.x - tol || p.x > bb.hi.x + tol || p.y < bb.lo.y - tol || p.y > bb.hi.y + tol)
                throw InvalidSpecError("obstacle segment leaves the bounding box");
        }
    }
}

std::size_t DomainMask::occupied_count() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](auto c) { return c != 0; }));
}

std::pair<int, int> DomainMask::locate(Point p) const {
    const int i = static_cast<int>(std::floor((p.x - origin_.x) / h_));
    const int j = static_cast<int>(std::floor((p.y - origin_.y) / h_));
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return {-1, -1};
    return {i, j};
}

bool DomainMask::contains(Point p) const {
    auto [i, j] = locate(p);
    return i >= 0 && occupied(i, j);
}

DomainMask rasterize(const ShapeSpec& spec, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("rasterize: h must be positive");
    spec.validate();
    if (h > spec.min_feature() / 8.0 * (1.0 + 1e-12)) {
        throw FeatureTooFineError("rasterize: h = " + std::to_string(h) + " exceeds 1/8 of the smallest feature (" +
                                  std::to_string(spec.min_feature()) + ") of " + spec.label());
    }
    const Box bb = spec.bounding_box();
    const int nx = static_cast<int>(std::ceil((bb.hi.x - bb.lo.x) / h - 1e-9)) + 2;
    const int ny = static_cast<int>(std::ceil((bb.hi.y - bb.lo.y) / h - 1e-9)) + 2;
    const Point origin{bb.lo.x - h, bb.lo.y - h};
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Point c{origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
            cells[static_cast<std::size_t>(j) * nx + i] = spec.contains(c) ? 1 : 0;
        }
    }
    DomainMask mask(h, origin, nx, ny, std::move(cells), spec.obstacles());
    if (mask.empty()) throw EmptyDomainError("rasterize: no cell center falls inside " + spec.label());
    return mask;
}

BoundaryDistance::BoundaryDistance(const DomainMask& mask)
    : h_(mask.h()), origin_(mask.origin()), bucket_cells_(8), segments_(mask.segments()) {
    const int nx = mask.nx();
    const int ny = mask.ny();
    // padded cell index range [-1, n] maps to [0, n + 1]
    bx_ = (nx + 2 + bucket_cells_ - 1) / bucket_cells_;
    by_ = (ny + 2 + bucket_cells_ - 1) / bucket_cells_;
    buckets_.resize(static_cast<std::size_t>(bx_) * by_);
    for (int j = -1; j <= ny; ++j) {
        for (int i = -1; i <= nx; ++i) {
            if (mask.occupied(i, j)) continue;
            const bool touches = mask.occupied(i - 1, j) || mask.occupied(i + 1, j) || mask.occupied(i, j - 1) ||
                                 mask.occupied(i, j + 1);
            if (!touches) continue;
            const int b = ((j + 1) / bucket_cells_) * bx_ + (i + 1) / bucket_cells_;
            buckets_[b].boxes.push_back(mask.cell_box(i, j));
            has_items_ = true;
        }
    }
    const double bucket_len = bucket_cells_ * h_;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const Segment& seg = segments_[s];
        const double len = norm(seg.b - seg.a);
        const int samples = std::max(2, static_cast<int>(std::ceil(len / (0.5 * bucket_len))) + 1);
        for (int k = 0; k < samples; ++k) {
            const Point p = seg.a + (static_cast<double>(k) / (samples - 1)) * (seg.b - seg.a);
            const int ci = static_cast<int>(std::floor((p.x - origin_.x) / h_)) + 1;
            const int cj = static_cast<int>(std::floor((p.y - origin_.y) / h_)) + 1;
            const int bi = std::clamp(ci / bucket_cells_, 0, bx_ - 1);
            const int bj = std::clamp(cj / bucket_cells_, 0, by_ - 1);
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const int ii = bi + di;
                    const int jj = bj + dj;
                    if (ii < 0 || jj < 0 || ii >= bx_ || jj >= by_) continue;
                    auto& list = buckets_[static_cast<std::size_t>(jj) * bx_ + ii].segments;
                    if (list.empty() || list.back() != s) list.push_back(s);
                }
            }
        }
        has_items_ = true;
    }
    for (auto& b : buckets_) {
        std::sort(b.segments.begin(), b.segments.end());
        b.segments.erase(std::unique(b.segments.begin(), b.segments.end()), b.segments.end());
    }
}

double BoundaryDistance::operator()(Point p) const {
    if (!has_items_) return std::numeric_limits<double>::infinity();
    const int ci = static_cast<int>(std::floor((p.x - origin_.x) / h_)) + 1;
    const int cj = static_cast<int>(std::floor((p.y - origin_.y) / h_)) + 1;
    const int qi = std::clamp(ci / bucket_cells_, 0, bx_ - 1);
    const int qj = std::clamp(cj / bucket_cells_, 0, by_ - 1);
    const double bucket_len = bucket_cells_ * h_;
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max(bx_, by_);
    for (int r = 0; r <= max_ring; ++r) {
        for (int jj = qj - r; jj <= qj + r; ++jj) {
            if (jj < 0 || jj >= by_) continue;
            const bool edge_row = (jj == qj - r || jj == qj + r);
            for (int ii = qi - r; ii <= qi + r; ii += (edge_row ? 1 : 2 * std::max(r, 1))) {
                if (ii < 0 || ii >= bx_) continue;
                const Bucket& b = buckets_[static_cast<std::size_t>(jj) * bx_ + ii];
                for (const Box& box : b.boxes) best = std::min(best, distance(p, box));
                for (std::size_t s : b.segments) best = std::min(best, distance(p, segments_[s]));
                if (r == 0) break;
            }
        }
        if (best <= r * bucket_len) break;
    }
    return best;
}

double distance_to_boundary(const DomainMask& mask, Point p) { return BoundaryDistance(mask)(p); }

InscribedDisk largest_inscribed_disk(const DomainMask& mask) {
    if (mask.empty()) throw EmptyDomainError("inradius: mask has no occupied cell");
    const BoundaryDistance dist(mask);
    InscribedDisk best;
    best.radius = -1.0;
    for (int j = 0; j < mask.ny(); ++j) {
        for (int i = 0; i < mask.nx(); ++i) {
            if (!mask.occupied(i, j)) continue;
            const Point c = mask.cell_center(i, j);
            const double d = dist(c);
            if (d > best.radius) {
                best.radius = d;
                best.center = c;
            }
        }
    }
    return best;
}

double inradius(const DomainMask& mask) { return largest_inscribed_disk(mask).radius; }

bool blocks(const Segment& obstacle, Point p, Point q) {
    const Point e = q - p;
    const Point d = obstacle.b - obstacle.a;
    const double elen = norm(e);
    const double dlen = norm(d);
    if (elen == 0.0) return false;
    const double tol = 1e-9 * elen;
    const double denom = cross(e, d);
    if (std::abs(denom) <= 1e-12 * elen * std::max(dlen, elen)) {
        // parallel: blocked only by a collinear overlap of positive length
        if (std::abs(cross(e, obstacle.a - p)) / elen > tol) return false;
        const double t0 = dot(obstacle.a - p, e) / (elen * elen);
        const double t1 = dot(obstacle.b - p, e) / (elen * elen);
        const double lo = std::max(0.0, std::min(t0, t1));
        const double hi = std::min(1.0, std::max(t0, t1));
        return (hi - lo) * elen > tol;
    }
    const Point w = obstacle.a - p;
    const double t = cross(w, d) / denom;  // parameter on p-q
    const double u = cross(w, e) / denom;  // parameter on the obstacle
    const double et = tol / elen;
    const double ut = dlen > 0.0 ? tol / dlen : 0.0;
    return t > et && t < 1.0 - et && u >= -ut && u <= 1.0 + ut;
}

bool intersects_open(const Segment& obstacle, const Box& box) {
    const double tol = 1e-9 * std::max(box.hi.x - box.lo.x, box.hi.y - box.lo.y);
    const Point lo{box.lo.x + tol, box.lo.y + tol};
    const Point hi{box.hi.x - tol, box.hi.y - tol};
    return clip_segment(obstacle.a, obstacle.b, lo, hi);
}

bool is_simply_connected(const DomainMask& mask) {
    if (mask.empty()) throw EmptyDomainError("is_simply_connected: mask has no occupied cell");
    const int nx = mask.nx();
    const int ny = mask.ny();
    const auto& segs = mask.segments();

    // Occupied region: 4-neighbour moves across cell edges not cut by an obstacle.
    {
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(nx) * ny, 0);
        std::queue<std::pair<int, int>> todo;
        std::size_t reached = 0;
        for (int j = 0; j < ny && todo.empty(); ++j)
            for (int i = 0; i < nx && todo.empty(); ++i)
                if (mask.occupied(i, j)) {
                    todo.push({i, j});
                    seen[static_cast<std::size_t>(j) * nx + i] = 1;
                }
        while (!todo.empty()) {
            auto [i, j] = todo.front();
            todo.pop();
            ++reached;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int a = i + di[k];
                const int b = j + dj[k];
                if (!mask.occupied(a, b) || seen[static_cast<std::size_t>(b) * nx + a]) continue;
                Point p;
                Point q;
                if (dj[k] == 0) {
                    const int xi = std::max(i, a);
                    p = mask.node(xi, j);
                    q = mask.node(xi, j + 1);
                } else {
                    const int yj = std::max(j, b);
                    p = mask.node(i, yj);
                    q = mask.node(i + 1, yj);
                }
                bool cut = false;
                for (const Segment& s : segs) {
                    if (blocks(s, p, q)) {
                        cut = true;
                        break;
                    }
                }
                if (cut) continue;
                seen[static_cast<std::size_t>(b) * nx + a] = 1;
                todo.push({a, b});
            }
        }
        if (reached != mask.occupied_count()) return false;
    }

    // Complement: padded unoccupied cells (8-neighbour) plus obstacle nodes.
    const int px = nx + 2;
    const int py = ny + 2;
    const std::size_t ncells = static_cast<std::size_t>(px) * py;
    UnionFind uf(ncells + segs.size());
    auto id = [&](int i, int j) { return static_cast<int>(static_cast<std::size_t>(j + 1) * px + (i + 1)); };
    for (int j = -1; j <= ny; ++j) {
        for (int i = -1; i <= nx; ++i) {
            if (mask.occupied(i, j)) continue;
            for (int dj = 0; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (dj == 0 && di <= 0) continue;
                    const int a = i + di;
                    const int b = j + dj;
                    if (a < -1 || a > nx || b > ny) continue;
                    if (!mask.occupied(a, b)) uf.unite(id(i, j), id(a, b));
                }
            }
        }
    }
    const double h = mask.h();
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const int node = static_cast<int>(ncells + s);
        const Segment& seg = segs[s];
        const int i0 = static_cast<int>(std::floor((std::min(seg.a.x, seg.b.x) - mask.origin().x) / h)) - 1;
        const int i1 = static_cast<int>(std::floor((std::max(seg.a.x, seg.b.x) - mask.origin().x) / h)) + 1;
        const int j0 = static_cast<int>(std::floor((std::min(seg.a.y, seg.b.y) - mask.origin().y) / h)) - 1;
        const int j1 = static_cast<int>(std::floor((std::max(seg.a.y, seg.b.y) - mask.origin().y) / h)) + 1;
        for (int j = std::max(j0, -1); j <= std::min(j1, ny); ++j) {
            for (int i = std::max(i0, -1); i <= std::min(i1, nx); ++i) {
                if (mask.occupied(i, j)) continue;
                const Box b = mask.cell_box(i, j);
                const double tol = 1e-9 * h;
                if (clip_segment(seg.a, seg.b, {b.lo.x - tol, b.lo.y - tol}, {b.hi.x + tol, b.hi.y + tol}))
                    uf.unite(node, id(i, j));
            }
        }
        for (std::size_t t = 0; t < s; ++t) {
            const Segment& o = segs[t];
            const bool touch = distance(seg.a, o) <= 1e-9 * h || distance(seg.b, o) <= 1e-9 * h ||
                               distance(o.a, seg) <= 1e-9 * h || distance(o.b, seg) <= 1e-9 * h ||
                               segments_cross(seg.a, seg.b, o.a, o.b);
            if (touch) uf.unite(node, static_cast<int>(ncells + t));
        }
    }
    int root = -1;
    for (int j = -1; j <= ny; ++j) {
        for (int i = -1; i <= nx; ++i) {
            if (mask.occupied(i, j)) continue;
            const int r = uf.find(id(i, j));
            if (root < 0) root = r;
            if (r != root) return false;
        }
    }
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (uf.find(static_cast<int>(ncells + s)) != root) return false;
    }
    return true;
}

DomainMask scale(const DomainMask& mask, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("scale: factor must be positive");
    std::vector<Segment> segs;
    segs.reserve(mask.segments().size());
    for (const Segment& s : mask.segments()) segs.push_back({t * s.a, t * s.b});
    return DomainMask(t * mask.h(), t * mask.origin(), mask.nx(), mask.ny(), mask.cells(), std::move(segs));
}

DomainMask refine(const DomainMask& mask, int factor) {
    if (factor < 1) throw DomainError("refine: factor must be at least 1");
    const int nx = mask.nx() * factor;
    const int ny = mask.ny() * factor;
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            cells[static_cast<std::size_t>(j) * nx + i] = mask.occupied(i / factor, j / factor) ? 1 : 0;
    return DomainMask(mask.h() / factor, mask.origin(), nx, ny, std::move(cells), mask.segments());
}

std::vector<Point> boundary_points(const DomainMask& mask) {
    std::vector<Point> out;
    for (int j = -1; j <= mask.ny(); ++j) {
        for (int i = -1; i <= mask.nx(); ++i) {
            if (mask.occupied(i, j)) continue;
            const bool touches = mask.occupied(i - 1, j) || mask.occupied(i + 1, j) || mask.occupied(i, j - 1) ||
                                 mask.occupied(i, j + 1);
            if (touches) out.push_back(mask.cell_center(i, j));
        }
    }
    for (const Segment& s : mask.segments()) {
        const double len = norm(s.b - s.a);
        const int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * mask.h()))));
        for (int k = 0; k <= n; ++k) out.push_back(s.a + (static_cast<double>(k) / n) * (s.b - s.a));
    }
    return out;
}

}  // namespace mhfrac
