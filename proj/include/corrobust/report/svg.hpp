#pragma once

#include <string>
#include <string_view>

#include <fmt/format.h>

namespace corrobust::svg {

inline std::string escape(std::string_view s) {
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

// Minimal append-only SVG builder. Origin is top-left, y grows downward.
class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none") {
    body_ += fmt::format(R"svg(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}" stroke="{}"/>)svg",
                         x, y, w, h, fill, stroke);
    body_ += '\n';
  }
  void circle(double cx, double cy, double r, std::string_view fill, double opacity = 1.0) {
    body_ += fmt::format(R"svg(<circle cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="{}" fill-opacity="{:.2f}"/>)svg", cx,
                         cy, r, fill, opacity);
    body_ += '\n';
  }
  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
            bool dashed = false) {
    body_ += fmt::format(R"svg(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}" stroke-width="{:.2f}"{}/>)svg",
                         x1, y1, x2, y2, stroke, width, dashed ? R"svg( stroke-dasharray="4,3")svg" : "");
    body_ += '\n';
  }
  void text(double x, double y, std::string_view s, double size = 11, std::string_view anchor = "start",
            double rotate = 0.0) {
    std::string transform;
    if (rotate != 0.0) transform = fmt::format(R"svg( transform="rotate({:.1f} {:.2f} {:.2f})")svg", rotate, x, y);
    body_ += fmt::format(R"svg(<text x="{:.2f}" y="{:.2f}" font-size="{:.1f}" font-family="sans-serif" text-anchor="{}"{}>{}</text>)svg",
                         x, y, size, anchor, transform, escape(s));
    body_ += '\n';
  }
  // Diagonal hatch pattern usable as fill="url(#hatch)".
  void define_hatch() {
    defs_ += R"svg(<pattern id="hatch" patternUnits="userSpaceOnUse" width="6" height="6" patternTransform="rotate(45)">)svg"
             R"svg(<rect width="6" height="6" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="6" stroke="#999999" stroke-width="2"/></pattern>)svg";
    defs_ += '\n';
  }

  double width() const { return width_; }
  double height() const { return height_; }

  std::string str() const {
    std::string out = fmt::format(
        R"svg(<svg xmlns="http://www.w3.org/2000/svg" width="{:.0f}" height="{:.0f}" viewBox="0 0 {:.0f} {:.0f}">)svg",
        width_, height_, width_, height_);
    out += '\n';
    if (!defs_.empty()) out += "<defs>\n" + defs_ + "</defs>\n";
    out += fmt::format(R"svg(<rect x="0" y="0" width="{:.0f}" height="{:.0f}" fill="#ffffff"/>)svg", width_, height_);
    out += '\n';
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  double width_, height_;
  std::string defs_;
  std::string body_;
};

}  // namespace corrobust::svg
