#include "courttrack/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace courttrack {

std::string render_tracks_svg(const Track& near, const Track& far,
                              const std::vector<Point2>& court_world) {
    double xmin = court_world.empty() ? 0.0 : court_world[0].x;
    double xmax = xmin, ymin = court_world.empty() ? 0.0 : court_world[0].y, ymax = ymin;
    auto grow = [&](const Point2& p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    };
    for (const auto& p : court_world) grow(p);
    for (const auto* t : {&near, &far})
        for (const auto& p : t->points) grow(p.world);
    if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-9) ymax = ymin + 1.0;

    const double scale = 40.0;  // px per meter
    const double pad = 20.0;
    const double width = (xmax - xmin) * scale + 2 * pad;
    const double height = (ymax - ymin) * scale + 2 * pad;
    auto sx = [&](double x) { return pad + (x - xmin) * scale; };
    // SVG y grows downward; flip so the far half renders on top.
    auto sy = [&](double y) { return height - pad - (y - ymin) * scale; };

    std::ostringstream svg;
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "viewBox=\"0 0 %.0f %.0f\">\n",
                  width, height, width, height);
    svg << buf;

    if (!court_world.empty()) {
        svg << "<polygon fill=\"#e8f5e9\" stroke=\"#2e7d32\" stroke-width=\"2\" points=\"";
        for (const auto& p : court_world) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(p.x), sy(p.y));
            svg << buf;
        }
        svg << "\"/>\n";
    }

    const char* colors[2] = {"#1f77b4", "#d62728"};
    int ci = 0;
    for (const auto* t : {&near, &far}) {
        const char* color = colors[ci++];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : t->points) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(p.world.x), sy(p.world.y));
            svg << buf;
        }
        svg << "\"/>\n";
        for (const auto& p : t->points) {
            if (p.source != PointSource::Interpolated) continue;
            std::snprintf(buf, sizeof(buf),
                          "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"none\" stroke=\"%s\" "
                          "stroke-dasharray=\"2,2\"/>\n",
                          sx(p.world.x), sy(p.world.y), color);
            svg << buf;
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace courttrack
