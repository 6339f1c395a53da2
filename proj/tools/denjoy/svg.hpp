#pragma once

#include <string>
#include <vector>

namespace denjoy::cli::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;

  std::string render(int width = 640, int height = 420) const;
};

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
  std::string color = "#1f77b4";
  std::string label;
  bool dashed = false;
};

struct Marker {
  double x = 0.0;
  double y = 0.0;
  std::string color = "#d62728";
  std::string label;
};

// Equal-aspect sketch of circles and point markers in the plane.
std::string circle_sketch(const std::string& title, const std::vector<Circle>& circles,
                          const std::vector<Marker>& markers, int size = 480);

std::string xml_escape(const std::string& s);

}  // namespace denjoy::cli::svg
