#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace certsens {

/// Minimal self-contained SVG line chart: axes, tick labels, one polyline
/// per series with a small legend.  Enough for convergence plots; not a
/// plotting library.
class SvgChart {
public:
    SvgChart(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_series(std::string name, std::vector<double> x, std::vector<double> y) {
        series_.push_back({std::move(name), std::move(x), std::move(y)});
    }

    std::string render() const {
        const double w = 760, h = 480;
        const double ml = 70, mr = 160, mt = 40, mb = 50;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        if (xmin > xmax) { xmin = 0; xmax = 1; }
        if (ymin > ymax) { ymin = 0; ymax = 1; }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
        const double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;

        auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
        auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                       "#9467bd", "#8c564b"};
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
           << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
           << title_ << "</text>\n";
        // axes
        os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
           << h - mb << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
           << "\" stroke=\"black\"/>\n";
        for (int t = 0; t <= 5; ++t) {
            const double xv = xmin + (xmax - xmin) * t / 5;
            const double yv = ymin + (ymax - ymin) * t / 5;
            os << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 18
               << "\" text-anchor=\"middle\">" << trim_num(xv) << "</text>\n";
            os << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
               << "\" text-anchor=\"end\">" << trim_num(yv) << "</text>\n";
            os << "<line x1=\"" << ml << "\" y1=\"" << py(yv) << "\" x2=\"" << w - mr
               << "\" y2=\"" << py(yv) << "\" stroke=\"#dddddd\"/>\n";
        }
        os << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 10
           << "\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
        os << "<text x=\"16\" y=\"" << (mt + h - mb) / 2 << "\" text-anchor=\"middle\" "
           << "transform=\"rotate(-90 16 " << (mt + h - mb) / 2 << ")\">" << y_label_
           << "</text>\n";

        for (std::size_t s = 0; s < series_.size(); ++s) {
            const char* color = colors[s % 6];
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < series_[s].x.size(); ++i) {
                if (!std::isfinite(series_[s].y[i])) continue;
                os << px(series_[s].x[i]) << "," << py(series_[s].y[i]) << " ";
            }
            os << "\"/>\n";
            const double ly = mt + 18.0 * s;
            os << "<line x1=\"" << w - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << w - mr + 34
               << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
            os << "<text x=\"" << w - mr + 40 << "\" y=\"" << ly + 4 << "\">" << series_[s].name
               << "</text>\n";
        }
        os << "</svg>\n";
        return os.str();
    }

private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };

    static std::string trim_num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

}  // namespace certsens
