#pragma once

#include <array>
#include <vector>

#include "textspot/errors.hpp"

namespace textspot {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Closed polygon given by its ordered control points. Image coordinates,
/// y growing downward; the canonical vertex order is clockwise on screen,
/// which makes the shoelace sum positive under this convention.
struct Polygon {
    std::vector<Point> points;
};

struct BBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

/// Shoelace sum / 2. Positive for clockwise-on-screen vertex order.
double polygon_signed_area(const Polygon& p);

/// Throws ValidationError unless the polygon is usable: >= 3 finite points,
/// no two consecutive points identical, nonzero area, not self-intersecting.
/// Orientation is not checked here; see oriented_clockwise().
void validate_polygon(const Polygon& p);

/// True when validate_polygon() would not throw.
bool polygon_is_valid(const Polygon& p);

void validate_bbox(const BBox& b);

/// Returns the polygon in canonical clockwise-on-screen order. Counter-
/// clockwise input is reversed, and *reversed (if given) reports that the
/// fix was applied; it is a data-quality warning, not an error.
Polygon oriented_clockwise(Polygon p, bool* reversed = nullptr);

/// Absolute area of a valid polygon.
double polygon_area(const Polygon& p);

/// Tight axis-aligned bounds.
BBox polygon_bbox(const Polygon& p);

/// Intersection area of two valid simple polygons (convex or not).
/// Both are ear-clipped into triangles and the triangle pairs are clipped
/// exactly, so the result is exact up to floating-point rounding.
double polygon_intersection_area(const Polygon& a, const Polygon& b);

/// |a n b| / |a u b| in [0, 1]. Symmetric; exactly 1 for identical point
/// lists.
double polygon_iou(const Polygon& a, const Polygon& b);

double bbox_iou(const BBox& a, const BBox& b);

/// IoU(a,b) - (|C| - |a u b|) / |C| with C the smallest enclosing box.
/// Zero-area boxes contribute area 0; if C itself is a single point (both
/// boxes are that point) the result is 1.
double bbox_giou(const BBox& a, const BBox& b);

/// Divides coordinates by (width, height); result lives in [0,1] for
/// in-bounds input. Throws on non-positive dimensions.
Polygon normalize_points(const Polygon& p, int width, int height);

/// Inverse of normalize_points.
Polygon denormalize_points(const Polygon& p, int width, int height);

/// Ear-clipping triangulation of a valid simple polygon.
std::vector<std::array<Point, 3>> triangulate(const Polygon& p);

}  // namespace textspot
