#include "courttrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace courttrack {

using nlohmann::json;

double px_to_cm(double err_px, double cm_per_px) {
    if (err_px < 0.0 || cm_per_px <= 0.0) {
        throw InvalidConfig("px_to_cm needs err_px >= 0 and cm_per_px > 0");
    }
    return err_px * cm_per_px;
}

ErrorReport compare_trajectories(const Track& est, const GroundTruthTrack& gt,
                                 ComparePlane plane, double cm_per_px) {
    std::map<std::int64_t, Point2> gt_by_frame;
    for (const auto& [frame, p] : gt.points) gt_by_frame[frame] = p;

    ErrorReport report;
    report.player = est.player;
    double sum = 0.0;
    for (const auto& tp : est.points) {
        auto it = gt_by_frame.find(tp.frame_id);
        if (it == gt_by_frame.end()) continue;
        const Point2& pos = plane == ComparePlane::Camera ? tp.cam : tp.world;
        double e = distance(pos, it->second);
        report.per_frame.emplace_back(tp.frame_id, e);
        sum += e;
        report.max_px = std::max(report.max_px, e);
    }
    if (report.per_frame.empty()) {
        throw NoOverlap("estimated and ground-truth tracks share no frame");
    }
    report.mean_px = sum / static_cast<double>(report.per_frame.size());
    report.mean_cm = px_to_cm(report.mean_px, cm_per_px);
    return report;
}

std::pair<GroundTruthTrack, GroundTruthTrack> load_ground_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    GroundTruthTrack near, far;
    near.player = Player::Near;
    far.player = Player::Far;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("frame,", 0) == 0) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 4) throw ParseError("expected `frame,player,x,y` in " + path, line_no);
        std::int64_t frame;
        Point2 p;
        try {
            frame = std::stoll(fields[0]);
            p = {std::stod(fields[2]), std::stod(fields[3])};
        } catch (const std::exception&) {
            throw ParseError("bad numeric field in " + path, line_no);
        }
        (player_from_string(fields[1]) == Player::Near ? near : far).points.emplace_back(frame, p);
    }
    return {std::move(near), std::move(far)};
}

std::string report_to_json(const std::vector<ErrorReport>& reports) {
    json j = json::array();
    for (const auto& r : reports) {
        json pf = json::array();
        for (const auto& [frame, e] : r.per_frame) pf.push_back({frame, e});
        j.push_back({{"player", to_string(r.player)},
                     {"mean_px", r.mean_px},
                     {"mean_cm", r.mean_cm},
                     {"max_px", r.max_px},
                     {"frames", r.per_frame.size()},
                     {"per_frame", std::move(pf)}});
    }
    return j.dump(2);
}

std::string report_to_table(const std::vector<ErrorReport>& reports) {
    std::ostringstream out;
    out << "player  frames  mean_px  mean_cm  max_px\n";
    char buf[128];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%-6s  %6zu  %7.3f  %7.3f  %6.3f\n",
                      to_string(r.player).c_str(), r.per_frame.size(), r.mean_px, r.mean_cm,
                      r.max_px);
        out << buf;
    }
    return out.str();
}

std::string error_curve_svg(const std::vector<ErrorReport>& reports) {
    const double width = 800.0, height = 300.0, pad = 40.0;
    std::int64_t fmin = 0, fmax = 1;
    double emax = 1e-9;
    bool first = true;
    for (const auto& r : reports) {
        for (const auto& [f, e] : r.per_frame) {
            if (first) {
                fmin = fmax = f;
                first = false;
            }
            fmin = std::min(fmin, f);
            fmax = std::max(fmax, f);
            emax = std::max(emax, e);
        }
    }
    if (fmax == fmin) fmax = fmin + 1;

    auto sx = [&](std::int64_t f) {
        return pad + (width - 2 * pad) * static_cast<double>(f - fmin) /
                         static_cast<double>(fmax - fmin);
    };
    auto sy = [&](double e) { return height - pad - (height - 2 * pad) * e / emax; };

    std::ostringstream svg;
    char buf[160];
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"300\" "
           "viewBox=\"0 0 800 300\">\n";
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  pad, pad, width - 2 * pad, height - 2 * pad);
    svg << buf;
    const char* colors[] = {"#1f77b4", "#d62728"};
    int ci = 0;
    for (const auto& r : reports) {
        svg << "<polyline fill=\"none\" stroke=\"" << colors[ci++ % 2] << "\" points=\"";
        for (const auto& [f, e] : r.per_frame) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(f), sy(e));
            svg << buf;
        }
        svg << "\"/>\n";
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">max error %.3f</text>\n", pad,
                  pad - 8.0, emax);
    svg << buf;
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace courttrack
