#include "textspot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace textspot {
namespace {

constexpr double kAreaEps = 1e-12;
constexpr double kPointEps = 1e-12;

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool points_equal(const Point& a, const Point& b) {
    return std::abs(a.x - b.x) <= kPointEps && std::abs(a.y - b.y) <= kPointEps;
}

bool on_segment(const Point& p, const Point& q, const Point& r) {
    return std::min(p.x, r.x) - kPointEps <= q.x && q.x <= std::max(p.x, r.x) + kPointEps &&
           std::min(p.y, r.y) - kPointEps <= q.y && q.y <= std::max(p.y, r.y) + kPointEps;
}

// Proper or improper intersection of closed segments [p1,p2] and [p3,p4].
bool segments_intersect(const Point& p1, const Point& p2, const Point& p3, const Point& p4) {
    const double d1 = cross(p3, p4, p1);
    const double d2 = cross(p3, p4, p2);
    const double d3 = cross(p1, p2, p3);
    const double d4 = cross(p1, p2, p4);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    if (std::abs(d1) <= kPointEps && on_segment(p3, p1, p4)) return true;
    if (std::abs(d2) <= kPointEps && on_segment(p3, p2, p4)) return true;
    if (std::abs(d3) <= kPointEps && on_segment(p1, p3, p2)) return true;
    if (std::abs(d4) <= kPointEps && on_segment(p1, p4, p2)) return true;
    return false;
}

bool self_intersects(const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i < n; ++i) {
        const Point& a0 = pts[i];
        const Point& a1 = pts[(i + 1) % n];
        for (int j = i + 1; j < n; ++j) {
            // Skip segments sharing a vertex with segment i.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(a0, a1, pts[j], pts[(j + 1) % n])) return true;
        }
    }
    return false;
}

// Strict interior test used by ear clipping.
bool point_in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
    const double d1 = cross(a, b, p);
    const double d2 = cross(b, c, p);
    const double d3 = cross(c, a, p);
    const bool has_neg = (d1 < -kPointEps) || (d2 < -kPointEps) || (d3 < -kPointEps);
    const bool has_pos = (d1 > kPointEps) || (d2 > kPointEps) || (d3 > kPointEps);
    return !(has_neg && has_pos);
}

// Sutherland-Hodgman clip of a convex subject by one half-plane (left of a->b).
std::vector<Point> clip_halfplane(const std::vector<Point>& subject, const Point& a, const Point& b) {
    std::vector<Point> out;
    out.reserve(subject.size() + 1);
    const std::size_t n = subject.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& cur = subject[i];
        const Point& nxt = subject[(i + 1) % n];
        const double dc = cross(a, b, cur);
        const double dn = cross(a, b, nxt);
        if (dc >= 0) out.push_back(cur);
        if ((dc > 0 && dn < 0) || (dc < 0 && dn > 0)) {
            const double t = dc / (dc - dn);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    return out;
}

double convex_area(const std::vector<Point>& pts) {
    if (pts.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& p = pts[i];
        const Point& q = pts[(i + 1) % pts.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return std::abs(s) * 0.5;
}

// Intersection area of two triangles via convex clipping. Triangles are
// reoriented counter-clockwise (positive math orientation) first.
double triangle_intersection_area(std::array<Point, 3> t, std::array<Point, 3> c) {
    if (cross(t[0], t[1], t[2]) < 0) std::swap(t[1], t[2]);
    if (cross(c[0], c[1], c[2]) < 0) std::swap(c[1], c[2]);
    std::vector<Point> poly(t.begin(), t.end());
    for (int i = 0; i < 3 && !poly.empty(); ++i) {
        poly = clip_halfplane(poly, c[i], c[(i + 1) % 3]);
    }
    return convex_area(poly);
}

bool same_point_list(const Polygon& a, const Polygon& b) {
    if (a.points.size() != b.points.size()) return false;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].x != b.points[i].x || a.points[i].y != b.points[i].y) return false;
    }
    return true;
}

// Canonical argument order so polygon_iou(a,b) and polygon_iou(b,a) run the
// identical float program.
bool polygon_less(const Polygon& a, const Polygon& b) {
    if (a.points.size() != b.points.size()) return a.points.size() < b.points.size();
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].x != b.points[i].x) return a.points[i].x < b.points[i].x;
        if (a.points[i].y != b.points[i].y) return a.points[i].y < b.points[i].y;
    }
    return false;
}

}  // namespace

double polygon_signed_area(const Polygon& p) {
    const std::size_t n = p.points.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = p.points[i];
        const Point& b = p.points[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

void validate_polygon(const Polygon& p) {
    const std::size_t n = p.points.size();
    if (n < 3) {
        throw ValidationError("polygon needs at least 3 points, got " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p.points[i].x) || !std::isfinite(p.points[i].y)) {
            throw ValidationError("polygon point " + std::to_string(i) + " is not finite");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (points_equal(p.points[i], p.points[(i + 1) % n])) {
            throw ValidationError("polygon points " + std::to_string(i) + " and " +
                                  std::to_string((i + 1) % n) + " coincide");
        }
    }
    if (std::abs(polygon_signed_area(p)) <= kAreaEps) {
        throw ValidationError("polygon is degenerate (zero area)");
    }
    if (self_intersects(p.points)) {
        throw ValidationError("polygon is self-intersecting");
    }
}

bool polygon_is_valid(const Polygon& p) {
    try {
        validate_polygon(p);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

void validate_bbox(const BBox& b) {
    if (!std::isfinite(b.x0) || !std::isfinite(b.y0) || !std::isfinite(b.x1) || !std::isfinite(b.y1)) {
        throw ValidationError("box has non-finite coordinate");
    }
    if (b.x0 > b.x1 || b.y0 > b.y1) {
        throw ValidationError("box corners out of order (x0<=x1, y0<=y1 required)");
    }
}

Polygon oriented_clockwise(Polygon p, bool* reversed) {
    validate_polygon(p);
    const bool flip = polygon_signed_area(p) < 0;
    if (flip) std::reverse(p.points.begin(), p.points.end());
    if (reversed) *reversed = flip;
    return p;
}

double polygon_area(const Polygon& p) {
    validate_polygon(p);
    return std::abs(polygon_signed_area(p));
}

BBox polygon_bbox(const Polygon& p) {
    validate_polygon(p);
    BBox b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    for (const Point& pt : p.points) {
        b.x0 = std::min(b.x0, pt.x);
        b.y0 = std::min(b.y0, pt.y);
        b.x1 = std::max(b.x1, pt.x);
        b.y1 = std::max(b.y1, pt.y);
    }
    return b;
}

std::vector<std::array<Point, 3>> triangulate(const Polygon& p) {
    validate_polygon(p);
    // Work in counter-clockwise (positive math) orientation.
    std::vector<Point> pts = p.points;
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % pts.size()];
        s += a.x * b.y - b.x * a.y;
    }
    if (s > 0) std::reverse(pts.begin(), pts.end());

    std::vector<std::array<Point, 3>> tris;
    std::vector<int> idx(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);

    double ear_eps = kPointEps;
    int stuck_scans = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const std::size_t m = idx.size();
            const Point& prev = pts[idx[(k + m - 1) % m]];
            const Point& cur = pts[idx[k]];
            const Point& next = pts[idx[(k + 1) % m]];
            const double turn = cross(prev, cur, next);
            if (turn < -ear_eps) continue;  // reflex vertex, not an ear
            bool contains_other = false;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == k || j == (k + m - 1) % m || j == (k + 1) % m) continue;
                if (point_in_triangle(pts[idx[j]], prev, cur, next)) {
                    contains_other = true;
                    break;
                }
            }
            if (contains_other) continue;
            if (turn > ear_eps) tris.push_back({prev, cur, next});
            idx.erase(idx.begin() + static_cast<long>(k));
            clipped = true;
            break;
        }
        if (!clipped) {
            // Numerically stuck; relax the convexity tolerance once, then give up.
            ear_eps *= 1e3;
            if (++stuck_scans > 8) {
                throw ValidationError("triangulation failed (near-degenerate polygon)");
            }
        }
    }
    tris.push_back({pts[idx[0]], pts[idx[1]], pts[idx[2]]});
    return tris;
}

double polygon_intersection_area(const Polygon& a, const Polygon& b) {
    const auto ta = triangulate(a);
    const auto tb = triangulate(b);
    const BBox ba = polygon_bbox(a);
    const BBox bb = polygon_bbox(b);
    if (ba.x1 < bb.x0 || bb.x1 < ba.x0 || ba.y1 < bb.y0 || bb.y1 < ba.y0) return 0.0;
    double inter = 0.0;
    for (const auto& t1 : ta) {
        for (const auto& t2 : tb) {
            inter += triangle_intersection_area(t1, t2);
        }
    }
    return inter;
}

double polygon_iou(const Polygon& a, const Polygon& b) {
    validate_polygon(a);
    validate_polygon(b);
    if (same_point_list(a, b)) return 1.0;
    const Polygon& first = polygon_less(a, b) ? a : b;
    const Polygon& second = polygon_less(a, b) ? b : a;
    const double inter = polygon_intersection_area(first, second);
    const double ua = std::abs(polygon_signed_area(first));
    const double ub = std::abs(polygon_signed_area(second));
    const double uni = ua + ub - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double bbox_iou(const BBox& a, const BBox& b) {
    validate_bbox(a);
    validate_bbox(b);
    const double iw = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
    const double ih = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

double bbox_giou(const BBox& a, const BBox& b) {
    validate_bbox(a);
    validate_bbox(b);
    const double iw = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
    const double ih = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    const double cw = std::max(a.x1, b.x1) - std::min(a.x0, b.x0);
    const double ch = std::max(a.y1, b.y1) - std::min(a.y0, b.y0);
    const double enclosing = cw * ch;
    if (enclosing <= 0.0) return 1.0;  // both boxes are the same single point
    const double iou = uni > 0.0 ? inter / uni : 0.0;
    return iou - (enclosing - uni) / enclosing;
}

Polygon normalize_points(const Polygon& p, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw ValidationError("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
    validate_polygon(p);
    Polygon out = p;
    for (Point& pt : out.points) {
        pt.x /= width;
        pt.y /= height;
    }
    return out;
}

Polygon denormalize_points(const Polygon& p, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw ValidationError("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
    validate_polygon(p);
    Polygon out = p;
    for (Point& pt : out.points) {
        pt.x *= width;
        pt.y *= height;
    }
    return out;
}

}  // namespace textspot
