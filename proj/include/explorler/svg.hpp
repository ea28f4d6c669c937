#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace explorler {

// Just enough SVG to draw contour maps and training curves.
class SvgWriter {
public:
    SvgWriter(double width, double height) : width_(width), height_(height) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
              << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
        body_ << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double stroke_width) {
        body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\""
              << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << stroke_width << "\"/>\n";
    }

    void path(const std::vector<std::array<double, 4>>& segments, const std::string& stroke, double stroke_width) {
        if (segments.empty()) return;
        body_ << "<path d=\"";
        for (const auto& s : segments)
            body_ << "M" << fmt(s[0]) << " " << fmt(s[1]) << "L" << fmt(s[2]) << " " << fmt(s[3]);
        body_ << "\" stroke=\"" << stroke << "\" stroke-width=\"" << stroke_width << "\" fill=\"none\"/>\n";
    }

    void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& stroke, double stroke_width) {
        if (pts.size() < 2) return;
        body_ << "<polyline points=\"";
        for (const auto& p : pts) body_ << fmt(p[0]) << "," << fmt(p[1]) << " ";
        body_ << "\" stroke=\"" << stroke << "\" stroke-width=\"" << stroke_width << "\" fill=\"none\"/>\n";
    }

    void polygon(const std::vector<std::array<double, 2>>& pts, const std::string& fill, double opacity) {
        if (pts.size() < 3) return;
        body_ << "<polygon points=\"";
        for (const auto& p : pts) body_ << fmt(p[0]) << "," << fmt(p[1]) << " ";
        body_ << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\"none\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << r << "\" fill=\"" << fill
              << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int font_size = 11) {
        body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"monospace\" font-size=\""
              << font_size << "\" fill=\"#333\">" << escape(s) << "</text>\n";
    }

    std::string str() const { return body_.str() + "</svg>\n"; }

    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("SvgWriter::save: cannot open " + path);
        os << str();
    }

    double width() const { return width_; }
    double height() const { return height_; }

private:
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return buf;
    }
    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '<')
                out += "&lt;";
            else if (c == '>')
                out += "&gt;";
            else if (c == '&')
                out += "&amp;";
            else
                out += c;
        }
        return out;
    }

    double width_, height_;
    std::ostringstream body_;
};

// Affine map from data space to pixel space with a y flip.
struct PlotFrame {
    double x0, x1, y0, y1;        // data bounds
    double px, py, pw, ph;        // pixel rect

    double to_px(double x) const { return px + (x - x0) / (x1 - x0) * pw; }
    double to_py(double y) const { return py + ph - (y - y0) / (y1 - y0) * ph; }
};

}  // namespace explorler
