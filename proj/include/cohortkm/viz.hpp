#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohortkm/guidance.hpp"
#include "cohortkm/matrix.hpp"

namespace cohortkm {

struct Point2D {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2D&, const Point2D&) = default;
    friend auto operator<=>(const Point2D&, const Point2D&) = default;
};

/// Counter-clockwise vertices starting at the lowest (x, y) point; collinear
/// boundary points are dropped.
struct HullPolygon {
    std::vector<Point2D> vertices;
};

/// Andrew's monotone chain. 1 distinct point → single vertex, all-collinear
/// input → the two extreme points.
HullPolygon convex_hull(std::span<const Point2D> points);

inline constexpr double kCanvasWidth = 800.0;
inline constexpr double kCanvasHeight = 600.0;
inline constexpr double kCanvasMargin = 40.0;

enum class MarkerShape { Circle, Square, Diamond, Triangle };

struct ClusterStyle {
    MarkerShape shape;
    std::string_view color;
};

/// Cluster c uses kClusterPalette[c % 4].
inline constexpr std::array<ClusterStyle, 4> kClusterPalette = {{
    {MarkerShape::Circle, "#2ca02c"},
    {MarkerShape::Square, "#ff7f0e"},
    {MarkerShape::Diamond, "#1f77b4"},
    {MarkerShape::Triangle, "#9467bd"},
}};

/// Scatter of an n×2 projection with per-cluster markers and translucent hulls
/// (hulls[c] belongs to cluster c). Throws BadShape on mismatched inputs.
std::string render_scatter(const Matrix& z, std::span<const std::size_t> labels,
                           std::span<const HullPolygon> hulls, std::string_view title = "");

/// Hulls of each cluster's points in z, indexed by cluster id in [0, k).
std::vector<HullPolygon> cluster_hulls(const Matrix& z, std::span<const std::size_t> labels,
                                       std::size_t k);

/// Radar polygon vertices for a centre and outer radius; axis a sits at angle
/// −90° + a·90° (CET up, then clockwise).
std::array<Point2D, 4> radar_vertices(const RadarVector& vector, Point2D centre, double radius);

inline constexpr Point2D kRadarCentre = {400.0, 300.0};
inline constexpr double kRadarRadius = 220.0;

std::string render_radar(const RadarVector& vector, std::string_view title);

/// Throws EmptyInput on an empty value list.
std::string render_histogram(std::span<const double> values, std::size_t bins,
                             std::string_view title);

std::string xml_escape(std::string_view text);

}  // namespace cohortkm
