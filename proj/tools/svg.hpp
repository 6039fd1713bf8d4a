#pragma once

// Minimal hand-rolled SVG plots. CSV stays the data of record.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

namespace oamclone::svg {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;        // data range
    double left, top, w, h;       // pixel box

    double px(double x) const { return left + (x - x0) / (x1 - x0) * w; }
    double py(double y) const { return top + h - (y - y0) / (y1 - y0) * h; }
};

class Document {
public:
    Document(int width, int height, const std::string& desc) {
        body_ = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
                "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        body_ += "<desc>" + escape(desc) + "</desc>\n";
        body_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }

    void text(double x, double y, const std::string& s, const char* anchor = "middle") {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
    }

    void line(double x1, double y1, double x2, double y2, const char* stroke = "black", const char* dash = nullptr) {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                 "\" stroke=\"" + stroke + "\"";
        if (dash) body_ += std::string(" stroke-dasharray=\"") + dash + "\"";
        body_ += "/>\n";
    }

    void circle(double cx, double cy, double r, const char* stroke, const char* fill = "none") {
        body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" stroke=\"" + stroke +
                 "\" fill=\"" + fill + "\"/>\n";
    }

    void polyline(const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys, const char* stroke) {
        body_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) body_ += num(f.px(xs[i])) + "," + num(f.py(ys[i])) + " ";
        body_ += "\"/>\n";
    }

    void axes(const Frame& f, const std::string& xlabel, const std::string& ylabel, int ticks = 5) {
        body_ += "<rect x=\"" + num(f.left) + "\" y=\"" + num(f.top) + "\" width=\"" + num(f.w) + "\" height=\"" +
                 num(f.h) + "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= ticks; ++i) {
            const double x = f.x0 + (f.x1 - f.x0) * i / ticks;
            const double y = f.y0 + (f.y1 - f.y0) * i / ticks;
            line(f.px(x), f.top + f.h, f.px(x), f.top + f.h + 4);
            text(f.px(x), f.top + f.h + 16, num(x));
            line(f.left - 4, f.py(y), f.left, f.py(y));
            text(f.left - 6, f.py(y) + 4, num(y), "end");
        }
        text(f.left + f.w / 2, f.top + f.h + 34, xlabel);
        body_ += "<text x=\"" + num(f.left - 44) + "\" y=\"" + num(f.top + f.h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 " +
                 num(f.left - 44) + " " + num(f.top + f.h / 2) + ")\">" + escape(ylabel) + "</text>\n";
    }

    std::string str() const { return body_ + "</svg>\n"; }

private:
    std::string body_;
};

}  // namespace oamclone::svg
