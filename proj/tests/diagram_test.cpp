#include "support/figures.hpp"

#include <geocalc/diagram.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

using namespace geocalc;
using namespace geocalc::testing;

namespace {

std::string golden_path(const std::string& name) { return std::string(GEOCALC_SOURCE_DIR) + "/tests/golden/" + name + ".svg"; }

std::size_t count(const std::string& s, const std::string& needle)
{
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1))
        ++n;
    return n;
}

struct pt {
    double x, y;
};

std::map<std::string, pt> circles(const std::string& svg)
{
    std::map<std::string, pt> out;
    std::regex re("<circle class=\"point\" id=\"([^\"]+)\" cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\"");
    for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it)
        out[(*it)[1]] = {std::stod((*it)[2]), std::stod((*it)[3])};
    return out;
}

}  // namespace

TEST(Diagram, Deterministic)
{
    for (const auto& f : reference_traces())
        EXPECT_EQ(render_trace(f.trace, 640, 480), render_trace(f.trace, 640, 480)) << f.name;
}

TEST(Diagram, CascadeStructure)
{
    auto figs = reference_traces();
    std::string svg = render_trace(figs[0].trace, 640, 480);
    for (const char* id : {"pt-A", "pt-B", "pt-C", "pt-D", "pt-E", "pt-F"})
        EXPECT_NE(svg.find(std::string("id=\"") + id + "\""), std::string::npos) << id;
    EXPECT_EQ(count(svg, "class=\"right-angle\""), 4u);
    EXPECT_EQ(count(svg, "class=\"measured\""), 1u);
    EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
}

TEST(Diagram, EmptyTraceRejected)
{
    try {
        render_trace(GeometricPrimitiveTrace{}, 640, 480);
        ADD_FAILURE();
    } catch (const calc_error& e) {
        EXPECT_EQ(e.code(), errc::inconsistent_trace);
    }
}

TEST(Diagram, BadGeometryRejected)
{
    auto skewed = GeometricPrimitiveTrace::parse("construct-angle-from-cosine C@0,0 B@1,0 A@1,1 cos=0.7071067811865476\n"
                                                 "drop-perpendicular A@1,1 B@1.001,0 C B\n");
    EXPECT_THROW(render_trace(skewed, 640, 480), calc_error);
    auto unknown = GeometricPrimitiveTrace::parse("measure-length A Q value=1\n");
    EXPECT_THROW(render_trace(unknown, 640, 480), calc_error);
    auto lopsided = GeometricPrimitiveTrace::parse("construct-angle-from-cosine C@0,0 X@1,0 Y@0,1 cos=0\n"
                                                   "bisect-angle C X Y W@1,0.5\n");
    EXPECT_THROW(render_trace(lopsided, 640, 480), calc_error);
}

TEST(Diagram, BisectDrawsBothSidesAndBisector)
{
    auto figs = reference_traces();
    std::string svg = render_trace(figs[1].trace, 640, 480);
    EXPECT_NE(svg.find("class=\"side\" data-from=\"pt-C\" data-to=\"pt-X\""), std::string::npos);
    EXPECT_NE(svg.find("class=\"side\" data-from=\"pt-C\" data-to=\"pt-Y\""), std::string::npos);
    EXPECT_NE(svg.find("class=\"bisector\" data-from=\"pt-C\" data-to=\"pt-Y_27\""), std::string::npos);
}

TEST(Diagram, RightAnglesSurviveRendering)
{
    // the drawn coordinates of every marked vertex still make a right angle
    std::regex mark("data-vertex=\"([^\"]+)\" data-arm1=\"([^\"]+)\" data-arm2=\"([^\"]+)\"");
    for (const auto& f : reference_traces()) {
        std::string svg = render_trace(f.trace, 800, 800);
        auto pts = circles(svg);
        int seen = 0;
        for (std::sregex_iterator it(svg.begin(), svg.end(), mark), end; it != end; ++it) {
            pt v = pts.at((*it)[1]), a = pts.at((*it)[2]), b = pts.at((*it)[3]);
            double ax = a.x - v.x, ay = a.y - v.y, bx = b.x - v.x, by = b.y - v.y;
            double c = (ax * bx + ay * by) / (std::hypot(ax, ay) * std::hypot(bx, by));
            EXPECT_LT(std::fabs(c), 1e-6) << f.name << " at " << (*it)[1];
            ++seen;
        }
        EXPECT_GT(seen, 0) << f.name;
    }
}

TEST(Diagram, RoundTripThroughText)
{
    for (const auto& f : reference_traces()) {
        auto again = GeometricPrimitiveTrace::parse(f.trace.to_text());
        EXPECT_EQ(render_trace(again, 640, 480), render_trace(f.trace, 640, 480)) << f.name;
    }
}

TEST(Diagram, GoldenFiles)
{
    bool update = std::getenv("GEOCALC_UPDATE_GOLDEN") != nullptr;
    for (const auto& f : reference_traces()) {
        std::string svg = render_trace(f.trace, 640, 480);
        if (update) {
            std::ofstream(golden_path(f.name), std::ios::binary) << svg;
            continue;
        }
        std::ifstream in(golden_path(f.name), std::ios::binary);
        ASSERT_TRUE(in) << "missing golden " << f.name;
        std::stringstream ss;
        ss << in.rdbuf();
        EXPECT_EQ(ss.str(), svg) << f.name;
    }
}
