#pragma once

// SVG drawing of a primitive trace. Output depends only on (trace, width, height).

#include "trace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace geocalc {

namespace diagram_detail {

inline std::string fixed9(double v)
{
    if (std::fabs(v) < 5e-10)
        v = 0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += ch;
        }
    }
    return out;
}

/// Labels like Y' become pt-Y_27.
inline std::string point_id(const std::string& label, int generation)
{
    std::string id = "pt-";
    for (unsigned char ch : label) {
        if (std::isalnum(ch))
            id += static_cast<char>(ch);
        else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "_%02X", ch);
            id += buf;
        }
    }
    if (generation > 1)
        id += "-" + std::to_string(generation);
    return id;
}

struct placed {
    std::string label;
    std::string id;
    vec2 at;
};

struct segment {
    std::string cls;
    std::string from, to;  // point ids
    vec2 a, b;
    bool extendable = false;
};

struct mark {
    std::string vertex, arm1, arm2;  // point ids
    vec2 v, u1, u2;                  // unit arms
    double limit = 0;                // shortest arm length
};

inline double angle_between(vec2 a, vec2 b) { return std::atan2(std::fabs(cross(a, b)), dot(a, b)); }

}  // namespace diagram_detail

/// Renders the trace into an SVG 1.1 document. Throws InconsistentTrace for an
/// empty trace, an unknown label or a step whose geometry does not hold.
inline std::string render_trace(const GeometricPrimitiveTrace& trace, int width, int height,
                                const std::string& caption_text = "")
{
    using namespace diagram_detail;
    if (trace.empty())
        throw calc_error(errc::inconsistent_trace, "nothing to draw");
    if (width < 16 || height < 16)
        throw calc_error(errc::domain_error, "canvas too small");

    std::vector<placed> points;
    std::map<std::string, std::size_t> current;  // label -> index into points
    std::map<std::string, int> generation;
    std::vector<segment> segments;
    std::vector<mark> marks;
    std::string caption = caption_text;

    auto bad = [](std::size_t step, const std::string& why) {
        return calc_error(errc::inconsistent_trace, "step " + std::to_string(step + 1) + ": " + why);
    };

    for (std::size_t si = 0; si < trace.steps().size(); ++si) {
        const TraceStep& st = trace.steps()[si];
        std::vector<std::size_t> idx;
        for (const auto& p : st.points) {
            if (p.at) {
                int g = ++generation[p.label];
                points.push_back({p.label, point_id(p.label, g), *p.at});
                current[p.label] = points.size() - 1;
            } else if (!current.count(p.label)) {
                throw bad(si, "point " + p.label + " used before it is placed");
            }
            idx.push_back(current[p.label]);
        }
        auto P = [&](std::size_t k) -> const placed& { return points[idx[k]]; };
        switch (st.kind) {
        case primitive::construct_angle_from_cosine: {
            vec2 d1 = P(1).at - P(0).at, d2 = P(2).at - P(0).at;
            if (norm(d1) == 0 || norm(d2) == 0)
                throw bad(si, "angle side of zero length");
            if (auto c = st.attr("cos")) {
                double want = std::stod(*c);
                double got = dot(d1, d2) / (norm(d1) * norm(d2));
                if (std::fabs(got - want) > 1e-6)
                    throw bad(si, "angle does not match cos=" + *c);
            }
            segments.push_back({"side", P(0).id, P(1).id, P(0).at, P(1).at, true});
            segments.push_back({"side", P(0).id, P(2).id, P(0).at, P(2).at, true});
            break;
        }
        case primitive::drop_perpendicular: {
            vec2 f = P(0).at, t = P(1).at, l1 = P(2).at, l2 = P(3).at;
            vec2 d = l2 - l1, arm = f - t;
            double dn = norm(d), an = norm(arm);
            if (dn == 0 || an == 0)
                throw bad(si, "degenerate perpendicular");
            if (std::fabs(dot(arm, d)) > 1e-9 * an * dn)
                throw bad(si, "segment " + P(0).label + P(1).label + " is not perpendicular to " + P(2).label +
                                  P(3).label);
            vec2 off = t - l1;
            double scale = std::max({dn, norm(off), an});
            if (std::fabs(cross(off, d)) > 1e-9 * scale * dn)
                throw bad(si, "foot " + P(1).label + " is off line " + P(2).label + P(3).label);
            if (dot(off, d) < -1e-9 * scale * dn)
                throw bad(si, "foot " + P(1).label + " lies behind " + P(2).label);
            segments.push_back({"perpendicular", P(0).id, P(1).id, f, t, false});
            // second arm runs toward whichever line point is farther from the foot
            vec2 toward = norm(l1 - t) > norm(l2 - t) ? l1 : l2;
            const placed& other = norm(l1 - t) > norm(l2 - t) ? P(2) : P(3);
            vec2 u2 = toward - t;
            marks.push_back({P(1).id, P(0).id, other.id, t, (1 / an) * arm, (1 / norm(u2)) * u2,
                             std::min(an, norm(u2))});
            break;
        }
        case primitive::bisect_angle: {
            vec2 v = P(0).at, r = P(3).at - v;
            double left = angle_between(P(1).at - v, r), right = angle_between(r, P(2).at - v);
            if (std::fabs(left - right) > 1e-9)
                throw bad(si, "ray " + P(0).label + P(3).label + " does not bisect the angle");
            segments.push_back({"bisector", P(0).id, P(3).id, v, P(3).at, true});
            break;
        }
        case primitive::rotate_hypotenuse: {
            vec2 o = P(0).at, c = P(1).at, a = P(2).at;
            vec2 d = a - c;
            double scale = std::max({norm(d), norm(o - c), 1e-300});
            if (norm(d) == 0 || std::fabs(cross(o - c, d)) > 1e-9 * scale * norm(d))
                throw bad(si, "turned hypotenuse misses its pivot " + P(0).label);
            segments.push_back({"trial", P(1).id, P(2).id, c, a, false});
            break;
        }
        case primitive::measure_length: {
            segments.push_back({"measured", P(0).id, P(1).id, P(0).at, P(1).at, false});
            if (caption_text.empty()) {
                caption = P(0).label + P(1).label;
                if (auto v = st.attr("value"))
                    caption += " = " + *v;
                if (auto i = st.attr("index"))
                    caption += " (perpendicular " + *i + ")";
            }
            break;
        }
        }
    }

    // angle sides and bisectors run out to the farthest placed point on the same ray
    for (auto& s : segments) {
        if (!s.extendable)
            continue;
        vec2 d = s.b - s.a;
        double len2 = dot(d, d);
        double best = 1;
        for (const auto& p : points) {
            vec2 w = p.at - s.a;
            double t = dot(w, d) / len2;
            if (t > best && std::fabs(cross(w, d)) <= 1e-9 * len2 * t)
                best = t;
        }
        s.b = s.a + best * d;
    }

    // viewport: uniform scale, 5% margin, y up
    double minx = points[0].at.x, maxx = minx, miny = points[0].at.y, maxy = miny;
    auto grow = [&](vec2 p) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    };
    for (const auto& p : points)
        grow(p.at);
    for (const auto& s : segments) {
        grow(s.a);
        grow(s.b);
    }
    double bw = std::max(maxx - minx, 1e-12), bh = std::max(maxy - miny, 1e-12);
    double mx = 0.05 * width, my = 0.05 * height;
    double k = std::min((width - 2 * mx) / bw, (height - 2 * my) / bh);
    double ox = mx + ((width - 2 * mx) - k * bw) / 2, oy = my + ((height - 2 * my) - k * bh) / 2;
    auto X = [&](vec2 p) { return fixed9(ox + k * (p.x - minx)); };
    auto Y = [&](vec2 p) { return fixed9(height - (oy + k * (p.y - miny))); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
           std::to_string(height) + "\">\n";
    out += "<title>" + xml_escape(caption) + "</title>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" fill=\"#ffffff\"/>\n";

    out += "<g id=\"segments\" fill=\"none\" stroke-linecap=\"round\">\n";
    for (const auto& s : segments) {
        std::string style;
        if (s.cls == "side")
            style = "stroke=\"#1f2d3d\" stroke-width=\"1.5\"";
        else if (s.cls == "perpendicular")
            style = "stroke=\"#2b6cb0\" stroke-width=\"1\"";
        else if (s.cls == "bisector")
            style = "stroke=\"#b7791f\" stroke-width=\"1\"";
        else if (s.cls == "trial")
            style = "stroke=\"#718096\" stroke-width=\"0.75\" stroke-dasharray=\"4 3\"";
        else
            style = "stroke=\"#c53030\" stroke-width=\"2.5\" stroke-opacity=\"0.6\"";
        out += "<line class=\"" + s.cls + "\" data-from=\"" + s.from + "\" data-to=\"" + s.to + "\" x1=\"" + X(s.a) +
               "\" y1=\"" + Y(s.a) + "\" x2=\"" + X(s.b) + "\" y2=\"" + Y(s.b) + "\" " + style + "/>\n";
    }
    out += "</g>\n";

    out += "<g id=\"right-angles\" fill=\"none\" stroke=\"#2b6cb0\" stroke-width=\"0.75\">\n";
    for (const auto& m : marks) {
        double side = std::min(8.0 / k, 0.3 * m.limit);
        vec2 p1 = m.v + side * m.u1, p2 = m.v + side * m.u2, corner = m.v + side * m.u1 + side * m.u2;
        out += "<path class=\"right-angle\" data-vertex=\"" + m.vertex + "\" data-arm1=\"" + m.arm1 +
               "\" data-arm2=\"" + m.arm2 + "\" d=\"M " + X(p1) + " " + Y(p1) + " L " + X(corner) + " " + Y(corner) +
               " L " + X(p2) + " " + Y(p2) + "\"/>\n";
    }
    out += "</g>\n";

    out += "<g id=\"points\" font-family=\"serif\" font-size=\"11\" fill=\"#1a202c\">\n";
    for (const auto& p : points) {
        out += "<circle class=\"point\" id=\"" + p.id + "\" cx=\"" + X(p.at) + "\" cy=\"" + Y(p.at) + "\" r=\"2\"/>\n";
        vec2 lab = p.at;
        out += "<text class=\"label\" x=\"" + fixed9(ox + k * (lab.x - minx) + 3) + "\" y=\"" +
               fixed9(height - (oy + k * (lab.y - miny)) - 3) + "\">" + xml_escape(p.label) + "</text>\n";
    }
    out += "</g>\n";
    out += "<text class=\"caption\" x=\"" + fixed9(mx) + "\" y=\"" + fixed9(height - my / 3) +
           "\" font-family=\"serif\" font-size=\"12\" fill=\"#1a202c\">" + xml_escape(caption) + "</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace geocalc
