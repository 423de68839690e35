/*
 * Copyright 2025 The rashaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace rashaudit::svg {

inline std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Minimal standalone SVG 1.1 document builder. Elements are appended as
/// text; the output carries no external references so it renders offline.
class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void rect(double x, double y, double w, double h, const std::string& style) {
    body_ += "  <rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" style=\"" + escape(style) + "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& style) {
    body_ += "  <line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" style=\"" + escape(style) + "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& style) {
    body_ += "  <circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" style=\"" + escape(style) + "\"/>\n";
  }

  void polygon(const std::vector<std::array<double, 2>>& points,
               const std::string& style) {
    body_ += "  <polygon points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i > 0) body_ += ' ';
      body_ += num(points[i][0]) + "," + num(points[i][1]);
    }
    body_ += "\" style=\"" + escape(style) + "\"/>\n";
  }

  void text(double x, double y, const std::string& content, const std::string& style) {
    body_ += "  <text x=\"" + num(x) + "\" y=\"" + num(y) + "\" style=\"" +
             escape(style) + "\">" + escape(content) + "</text>\n";
  }

  std::string render() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " +
           num(width_) + " " + num(height_) + "\">\n";
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  double width_;
  double height_;
  std::string body_;
};

}  // namespace rashaudit::svg
