#include "cohortkm/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "cohortkm/dataset.hpp"
#include "cohortkm/error.hpp"

namespace cohortkm {

namespace {

double cross(const Point2D& o, const Point2D& a, const Point2D& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    // Avoid "-0.000".
    if (std::string_view(buf) == "-0.000") return "0.000";
    return buf;
}

class SvgDocument {
public:
    explicit SvgDocument(std::string_view title) {
        body_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
                "height=\"600\" viewBox=\"0 0 800 600\">\n"
                "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
        if (!title.empty())
            body_ += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                     "font-size=\"16\">" + xml_escape(title) + "</text>\n";
    }

    void add(std::string element) {
        body_ += element;
        body_ += '\n';
    }

    std::string finish() && { return std::move(body_) + "</svg>\n"; }

private:
    std::string body_;
};

std::string points_attr(std::span<const Point2D> pts) {
    std::string out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ' ';
        out += num(pts[i].x) + "," + num(pts[i].y);
    }
    return out;
}

std::string marker(MarkerShape shape, Point2D at, std::string_view color) {
    constexpr double r = 4.0;
    const std::string fill = "fill=\"" + std::string(color) + "\"";
    switch (shape) {
        case MarkerShape::Circle:
            return "<circle cx=\"" + num(at.x) + "\" cy=\"" + num(at.y) + "\" r=\"" + num(r) + "\" " +
                   fill + "/>";
        case MarkerShape::Square:
            return "<rect class=\"square\" x=\"" + num(at.x - r) + "\" y=\"" + num(at.y - r) + "\" width=\"" +
                   num(2 * r) + "\" height=\"" + num(2 * r) + "\" " + fill + "/>";
        case MarkerShape::Diamond: {
            const std::array<Point2D, 4> d = {{{at.x, at.y - r - 1}, {at.x + r + 1, at.y},
                                              {at.x, at.y + r + 1}, {at.x - r - 1, at.y}}};
            return "<polygon class=\"diamond\" points=\"" + points_attr(d) + "\" " + fill + "/>";
        }
        case MarkerShape::Triangle: {
            const std::array<Point2D, 3> t = {{{at.x, at.y - r - 1}, {at.x + r + 1, at.y + r},
                                              {at.x - r - 1, at.y + r}}};
            return "<polygon class=\"triangle\" points=\"" + points_attr(t) + "\" " + fill + "/>";
        }
    }
    return {};
}

/// Maps data coordinates onto the plot area inside the margins (y flipped).
struct PlotFrame {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

    Point2D map(Point2D p) const {
        const double w = kCanvasWidth - 2 * kCanvasMargin;
        const double h = kCanvasHeight - 2 * kCanvasMargin;
        return {kCanvasMargin + (p.x - x_min) / (x_max - x_min) * w,
                kCanvasHeight - kCanvasMargin - (p.y - y_min) / (y_max - y_min) * h};
    }
};

void add_axes(SvgDocument& doc) {
    const auto left = num(kCanvasMargin);
    const auto right = num(kCanvasWidth - kCanvasMargin);
    const auto top = num(kCanvasMargin);
    const auto bottom = num(kCanvasHeight - kCanvasMargin);
    doc.add("<line class=\"axis\" x1=\"" + left + "\" y1=\"" + bottom + "\" x2=\"" + right +
            "\" y2=\"" + bottom + "\" stroke=\"#000000\"/>");
    doc.add("<line class=\"axis\" x1=\"" + left + "\" y1=\"" + bottom + "\" x2=\"" + left +
            "\" y2=\"" + top + "\" stroke=\"#000000\"/>");
}

}  // namespace

HullPolygon convex_hull(std::span<const Point2D> input) {
    std::vector<Point2D> pts(input.begin(), input.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return {pts};

    std::vector<Point2D> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);  // last point repeats the first
    return {hull};
}

std::vector<HullPolygon> cluster_hulls(const Matrix& z, std::span<const std::size_t> labels,
                                       std::size_t k) {
    if (z.cols() != 2 || z.rows() != labels.size())
        throw BadShape("cluster_hulls needs an n×2 matrix and n labels");
    std::vector<std::vector<Point2D>> groups(k);
    for (std::size_t i = 0; i < z.rows(); ++i) {
        if (labels[i] >= k) throw BadShape("label outside [0, k)");
        groups[labels[i]].push_back({z(i, 0), z(i, 1)});
    }
    std::vector<HullPolygon> hulls;
    for (const auto& g : groups) hulls.push_back(g.empty() ? HullPolygon{} : convex_hull(g));
    return hulls;
}

std::string render_scatter(const Matrix& z, std::span<const std::size_t> labels,
                           std::span<const HullPolygon> hulls, std::string_view title) {
    if ((z.rows() > 0 && z.cols() != 2) || z.rows() != labels.size())
        throw BadShape("scatter needs an n×2 matrix and n labels");
    SvgDocument doc(title);
    add_axes(doc);
    if (z.rows() == 0) return std::move(doc).finish();

    PlotFrame frame{z(0, 0), z(0, 0), z(0, 1), z(0, 1)};
    for (std::size_t i = 0; i < z.rows(); ++i) {
        frame.x_min = std::min(frame.x_min, z(i, 0));
        frame.x_max = std::max(frame.x_max, z(i, 0));
        frame.y_min = std::min(frame.y_min, z(i, 1));
        frame.y_max = std::max(frame.y_max, z(i, 1));
    }
    const double pad_x = frame.x_max > frame.x_min ? 0.05 * (frame.x_max - frame.x_min) : 0.5;
    const double pad_y = frame.y_max > frame.y_min ? 0.05 * (frame.y_max - frame.y_min) : 0.5;
    frame.x_min -= pad_x;
    frame.x_max += pad_x;
    frame.y_min -= pad_y;
    frame.y_max += pad_y;

    for (std::size_t c = 0; c < hulls.size(); ++c) {
        if (hulls[c].vertices.size() < 2) continue;
        std::vector<Point2D> mapped;
        for (const auto& v : hulls[c].vertices) mapped.push_back(frame.map(v));
        const auto color = std::string(kClusterPalette[c % kClusterPalette.size()].color);
        doc.add("<polygon class=\"hull\" points=\"" + points_attr(mapped) + "\" fill=\"" + color +
                "\" fill-opacity=\"0.15\" stroke=\"" + color + "\" stroke-width=\"1\"/>");
    }
    for (std::size_t i = 0; i < z.rows(); ++i) {
        const auto& style = kClusterPalette[labels[i] % kClusterPalette.size()];
        doc.add(marker(style.shape, frame.map({z(i, 0), z(i, 1)}), style.color));
    }
    doc.add("<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"12\">PC1</text>");
    doc.add("<text x=\"12\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "font-size=\"12\" transform=\"rotate(-90 12 300)\">PC2</text>");
    return std::move(doc).finish();
}

std::array<Point2D, 4> radar_vertices(const RadarVector& vector, Point2D centre, double radius) {
    std::array<Point2D, 4> out{};
    for (std::size_t a = 0; a < 4; ++a) {
        const double angle = -std::numbers::pi / 2.0 + static_cast<double>(a) * std::numbers::pi / 2.0;
        const double r = vector.axes[a] * radius;
        out[a] = {centre.x + r * std::cos(angle), centre.y + r * std::sin(angle)};
    }
    return out;
}

std::string render_radar(const RadarVector& vector, std::string_view title) {
    SvgDocument doc(title);
    for (double ring : {0.25, 0.5, 0.75, 1.0}) {
        const auto grid = radar_vertices({{ring, ring, ring, ring}}, kRadarCentre, kRadarRadius);
        doc.add("<polygon class=\"grid\" points=\"" + points_attr(grid) +
                "\" fill=\"none\" stroke=\"#cccccc\"/>");
    }
    const auto spokes = radar_vertices({{1, 1, 1, 1}}, kRadarCentre, kRadarRadius);
    for (std::size_t a = 0; a < 4; ++a) {
        doc.add("<line class=\"spoke\" x1=\"" + num(kRadarCentre.x) + "\" y1=\"" + num(kRadarCentre.y) +
                "\" x2=\"" + num(spokes[a].x) + "\" y2=\"" + num(spokes[a].y) + "\" stroke=\"#999999\"/>");
        const auto label = radar_vertices({{1.12, 1.12, 1.12, 1.12}}, kRadarCentre, kRadarRadius)[a];
        doc.add("<text x=\"" + num(label.x) + "\" y=\"" + num(label.y) +
                "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
                std::string(kRadarAxes[a]) + "</text>");
    }
    const auto shape = radar_vertices(vector, kRadarCentre, kRadarRadius);
    doc.add("<polygon class=\"profile\" points=\"" + points_attr(shape) +
            "\" fill=\"#1f77b4\" fill-opacity=\"0.35\" stroke=\"#1f77b4\" stroke-width=\"2\"/>");
    return std::move(doc).finish();
}

std::string render_histogram(std::span<const double> values, std::size_t bins,
                             std::string_view title) {
    if (values.empty()) throw EmptyInput("histogram of no values");
    if (bins == 0) throw BadShape("histogram needs at least one bin");
    const auto hist = equal_width_histogram(values, bins);
    std::size_t peak = 0;
    for (const auto& b : hist) peak = std::max(peak, b.count);

    SvgDocument doc(title);
    add_axes(doc);
    const double plot_w = kCanvasWidth - 2 * kCanvasMargin;
    const double plot_h = kCanvasHeight - 2 * kCanvasMargin;
    const double bar_w = plot_w / static_cast<double>(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const double h = static_cast<double>(hist[i].count) / static_cast<double>(peak) * plot_h;
        doc.add("<rect class=\"bar\" data-count=\"" + std::to_string(hist[i].count) + "\" x=\"" +
                num(kCanvasMargin + bar_w * static_cast<double>(i)) + "\" y=\"" +
                num(kCanvasHeight - kCanvasMargin - h) + "\" width=\"" + num(bar_w) + "\" height=\"" +
                num(h) + "\" fill=\"#4c72b0\" stroke=\"#ffffff\"/>");
    }
    doc.add("<text x=\"" + num(kCanvasMargin) + "\" y=\"" + num(kCanvasHeight - 20) +
            "\" font-family=\"sans-serif\" font-size=\"12\">" + num(hist.front().lower) + "</text>");
    doc.add("<text x=\"" + num(kCanvasWidth - kCanvasMargin) + "\" y=\"" + num(kCanvasHeight - 20) +
            "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
            num(hist.back().upper) + "</text>");
    return std::move(doc).finish();
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace cohortkm
