#pragma once

// Line-oriented record of the geometric primitives used by a computation.
//
//   construct-angle-from-cosine V@x,y P@x,y Q@x,y cos=c      angle P-V-Q
//   drop-perpendicular F@x,y T@x,y L1 L2                     F-T perpendicular to line L1-L2, T on it
//   bisect-angle V P Q R@x,y                                 ray V-R bisects P-V-Q
//   rotate-hypotenuse O C1@x,y A1@x,y cos=c measured=m       hypotenuse turned about O
//   measure-length P Q value=v
//
// `Label@x,y` defines (or moves) a point, a bare `Label` refers to an existing one.

#include "numeric_core.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace geocalc {

enum class primitive {
    construct_angle_from_cosine,
    drop_perpendicular,
    bisect_angle,
    rotate_hypotenuse,
    measure_length,
};

constexpr std::string_view primitive_name(primitive p) noexcept
{
    switch (p) {
    case primitive::construct_angle_from_cosine: return "construct-angle-from-cosine";
    case primitive::drop_perpendicular: return "drop-perpendicular";
    case primitive::bisect_angle: return "bisect-angle";
    case primitive::rotate_hypotenuse: return "rotate-hypotenuse";
    case primitive::measure_length: return "measure-length";
    }
    return "";
}

inline std::optional<primitive> primitive_from_name(std::string_view s) noexcept
{
    for (auto p : {primitive::construct_angle_from_cosine, primitive::drop_perpendicular, primitive::bisect_angle,
                   primitive::rotate_hypotenuse, primitive::measure_length}) {
        if (primitive_name(p) == s)
            return p;
    }
    return std::nullopt;
}

/// Number of point operands each primitive takes.
constexpr std::size_t primitive_arity(primitive p) noexcept
{
    switch (p) {
    case primitive::construct_angle_from_cosine: return 3;
    case primitive::drop_perpendicular: return 4;
    case primitive::bisect_angle: return 4;
    case primitive::rotate_hypotenuse: return 3;
    case primitive::measure_length: return 2;
    }
    return 0;
}

struct vec2 {
    double x = 0;
    double y = 0;
};

inline vec2 operator+(vec2 a, vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline vec2 operator-(vec2 a, vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline vec2 operator*(double s, vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(vec2 a, vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(vec2 a) { return std::hypot(a.x, a.y); }

/// Foot of the perpendicular from p onto the line through a and b.
inline vec2 project_onto_line(vec2 p, vec2 a, vec2 b)
{
    vec2 d = b - a;
    double t = dot(p - a, d) / dot(d, d);
    return a + t * d;
}

struct TracePoint {
    std::string label;
    std::optional<vec2> at;  // set when the step defines or moves the point
};

struct TraceStep {
    primitive kind;
    std::vector<TracePoint> points;
    std::vector<std::pair<std::string, std::string>> attrs;

    std::optional<std::string> attr(std::string_view key) const
    {
        for (const auto& [k, v] : attrs)
            if (k == key)
                return v;
        return std::nullopt;
    }
};

inline std::string format_coord(double v)
{
    if (v == 0)
        v = 0;  // drop negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class GeometricPrimitiveTrace {
public:
    const std::vector<TraceStep>& steps() const noexcept { return steps_; }
    bool empty() const noexcept { return steps_.empty(); }
    std::size_t size() const noexcept { return steps_.size(); }

    void add(TraceStep step)
    {
        if (step.points.size() != primitive_arity(step.kind))
            throw calc_error(errc::inconsistent_trace, std::string(primitive_name(step.kind)) + " has wrong operand count");
        steps_.push_back(std::move(step));
    }

    void append(const GeometricPrimitiveTrace& other)
    {
        steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
    }

    std::string to_text() const
    {
        std::ostringstream os;
        for (const auto& s : steps_) {
            os << primitive_name(s.kind);
            for (const auto& p : s.points) {
                os << ' ' << p.label;
                if (p.at)
                    os << '@' << format_coord(p.at->x) << ',' << format_coord(p.at->y);
            }
            for (const auto& [k, v] : s.attrs)
                os << ' ' << k << '=' << v;
            os << '\n';
        }
        return os.str();
    }

    static GeometricPrimitiveTrace parse(std::string_view text)
    {
        GeometricPrimitiveTrace out;
        std::istringstream is{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#')
                continue;
            std::istringstream ls(line);
            std::string word;
            ls >> word;
            auto kind = primitive_from_name(word);
            auto bad = [&](const std::string& why) {
                return calc_error(errc::inconsistent_trace, "line " + std::to_string(lineno) + ": " + why);
            };
            if (!kind)
                throw bad("unknown primitive '" + word + "'");
            TraceStep step{*kind, {}, {}};
            while (ls >> word) {
                if (auto eq = word.find('='); eq != std::string::npos) {
                    step.attrs.emplace_back(word.substr(0, eq), word.substr(eq + 1));
                    continue;
                }
                TracePoint p;
                if (auto at = word.find('@'); at != std::string::npos) {
                    p.label = word.substr(0, at);
                    std::string xy = word.substr(at + 1);
                    auto comma = xy.find(',');
                    if (comma == std::string::npos)
                        throw bad("malformed coordinates '" + word + "'");
                    try {
                        std::size_t used = 0;
                        double x = std::stod(xy.substr(0, comma), &used);
                        double y = std::stod(xy.substr(comma + 1));
                        p.at = vec2{x, y};
                    } catch (const std::exception&) {
                        throw bad("malformed coordinates '" + word + "'");
                    }
                } else {
                    p.label = word;
                }
                if (p.label.empty())
                    throw bad("empty point label");
                step.points.push_back(std::move(p));
            }
            if (step.points.size() != primitive_arity(step.kind))
                throw bad(std::string(primitive_name(step.kind)) + " expects " +
                          std::to_string(primitive_arity(step.kind)) + " points");
            out.steps_.push_back(std::move(step));
        }
        return out;
    }

private:
    std::vector<TraceStep> steps_;
};

namespace figure {

inline TracePoint def(std::string label, vec2 at) { return TracePoint{std::move(label), at}; }
inline TracePoint ref(std::string label) { return TracePoint{std::move(label), std::nullopt}; }

inline std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Labels of the successive perpendicular feet: D, E, ..., Z, then P27, P28, ...
inline std::string foot_label(std::size_t i, const std::string& suffix = "")
{
    // i = 1 is the foot of BD
    if (i + 2 < 26)
        return std::string(1, static_cast<char>('C' + i)) + suffix;
    return "P" + std::to_string(i + 3) + suffix;
}

/// Coordinates of a cascade triangle with the angle vertex C at `origin`, base
/// along +x, perpendicular AB of length P and `depth` alternating perpendiculars.
struct cascade_points {
    vec2 c, b, a;
    std::vector<vec2> feet;  // feet[i-1] is the far end of perpendicular p_i
};

inline cascade_points cascade_geometry(double cos_c, double P, std::size_t depth, vec2 origin = {0, 0})
{
    double sin_c = std::sqrt(1 - cos_c * cos_c);
    double bc = P * cos_c / sin_c;
    cascade_points out;
    out.c = origin;
    out.b = origin + vec2{bc, 0};
    out.a = origin + vec2{bc, P};
    vec2 prev = out.b;
    for (std::size_t i = 1; i <= depth; ++i) {
        vec2 foot = (i % 2 == 1) ? project_onto_line(prev, out.c, out.a) : project_onto_line(prev, out.c, out.b);
        out.feet.push_back(foot);
        prev = foot;
    }
    return out;
}

/// Most perpendiculars drawn explicitly; deeper cascades are only measured.
inline constexpr std::size_t max_drawn_depth = 24;

/// Forward cascade of the basic figure: triangle ABC, perpendiculars p_1..p_depth,
/// then a measurement of the last one.
inline void emit_cascade(GeometricPrimitiveTrace& t, double cos_c, double P, std::int64_t depth,
                         const std::string& measured_value, const std::string& suffix = "")
{
    std::size_t drawn = static_cast<std::size_t>(std::min<std::int64_t>(depth, max_drawn_depth));
    auto g = cascade_geometry(cos_c, P, drawn);
    std::string A = "A" + suffix, B = "B" + suffix, C = "C" + suffix;
    t.add({primitive::construct_angle_from_cosine, {def(C, g.c), def(B, g.b), def(A, g.a)}, {{"cos", num(cos_c)}}});
    std::string prev = B;
    for (std::size_t i = 1; i <= drawn; ++i) {
        std::string foot = foot_label(i, suffix);
        if (i % 2 == 1)
            t.add({primitive::drop_perpendicular, {ref(prev), def(foot, g.feet[i - 1]), ref(C), ref(A)}, {}});
        else
            t.add({primitive::drop_perpendicular, {ref(prev), def(foot, g.feet[i - 1]), ref(C), ref(B)}, {}});
        prev = foot;
    }
    std::string from = drawn >= 2 ? foot_label(drawn - 1, suffix) : B;
    std::string to = drawn >= 1 ? foot_label(drawn, suffix) : A;
    std::vector<std::pair<std::string, std::string>> attrs{{"value", measured_value}};
    if (static_cast<std::int64_t>(drawn) < depth)
        attrs.emplace_back("index", std::to_string(depth));
    t.add({primitive::measure_length, {ref(from), ref(to)}, std::move(attrs)});
}

/// Cascade of even depth whose last perpendicular (hypotenuse point to base)
/// has fixed length `last` with its foot at (1, 0). Rotating the hypotenuse
/// about the top of that perpendicular changes AB. Points are q_0 = A, q_1 = B,
/// then the feet D, E, ...; returns them in that order.
inline std::vector<vec2> anchored_points(double cos_c, double last, std::size_t depth)
{
    double P = last / std::pow(cos_c, static_cast<double>(depth));
    auto g = cascade_geometry(cos_c, P, depth);
    vec2 shift = vec2{1, 0} - g.feet.back();
    std::vector<vec2> q{g.a + shift, g.b + shift};
    for (auto f : g.feet)
        q.push_back(f + shift);
    q.push_back(g.c + shift);  // vertex C last
    return q;
}

inline std::string anchored_label(std::size_t i, const std::string& suffix)
{
    if (i == 0)
        return "A" + suffix;
    if (i == 1)
        return "B" + suffix;
    return foot_label(i - 1, suffix);
}

/// Emits the perpendiculars from the anchor back up to AB, then measures AB.
inline void emit_anchored_cascade(GeometricPrimitiveTrace& t, const std::vector<vec2>& q, std::size_t depth,
                                  const std::string& suffix, const std::string& C, const std::string& value,
                                  std::size_t measured = 0)
{
    std::string hyp_anchor = anchored_label(depth, "");
    std::string base_anchor = anchored_label(depth + 1, "");
    for (std::size_t i = depth; i-- > 0;) {
        std::string from = anchored_label(i, suffix);
        std::string foot = i + 1 >= depth ? anchored_label(i + 1, "") : anchored_label(i + 1, suffix);
        const std::string& other = (i % 2 == 0) ? base_anchor : hyp_anchor;
        t.add({primitive::drop_perpendicular, {def(from, q[i]), ref(foot), ref(C), ref(other)}, {}});
    }
    t.add({primitive::measure_length, {ref(anchored_label(measured, suffix)), ref(anchored_label(measured + 1, suffix))},
           {{"value", value}}});
}

/// Root search drawing: perpendicular of index `depth` held fixed while
/// the hypotenuse turns about its top; `trials` are the cosines tried.
/// `measured` picks the perpendicular read at the end (0 = AB, 1 = BD).
inline void emit_root_search(GeometricPrimitiveTrace& t, std::size_t depth, double last, const std::vector<double>& trials,
                             double final_cos, const std::string& measured_ab, std::size_t measured = 0)
{
    if (trials.empty())
        return;
    std::string hyp_anchor = anchored_label(depth, "");
    std::string base_anchor = anchored_label(depth + 1, "");
    auto q0 = anchored_points(trials.front(), last, depth);
    t.add({primitive::construct_angle_from_cosine, {def("C", q0.back()), def(base_anchor, q0[depth + 1]), def(hyp_anchor, q0[depth])},
           {{"cos", num(trials.front())}}});
    emit_anchored_cascade(t, q0, depth, "", "C", num(norm(q0[measured] - q0[measured + 1])), measured);
    for (std::size_t i = 1; i < trials.size(); ++i) {
        auto q = anchored_points(trials[i], last, depth);
        t.add({primitive::rotate_hypotenuse, {ref(hyp_anchor), def("Cr", q.back()), def("Ar", q[0])},
               {{"cos", num(trials[i])}, {"measured", num(norm(q[measured] - q[measured + 1]))}}});
    }
    auto q = anchored_points(final_cos, last, depth);
    t.add({primitive::rotate_hypotenuse, {ref(hyp_anchor), def("C1", q.back()), def("A1", q[0])},
           {{"cos", num(final_cos)}, {"measured", measured_ab}}});
    emit_anchored_cascade(t, q, depth, "1", "C1", measured_ab, measured);
}

}  // namespace figure

}  // namespace geocalc
