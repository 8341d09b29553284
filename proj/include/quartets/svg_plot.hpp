#pragma once

// Static four-panel scatter plot (exposure vs outcome) with the fitted
// least-squares line and its slope in each panel.

#include "quartets/catalog.hpp"
#include "quartets/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace quartets {

struct PanelSummary {
    MechanismTag tag;
    double slope = 0.0;
    double intercept = 0.0;
};

struct QuartetPlot {
    std::string svg;
    std::vector<PanelSummary> panels;
};

inline QuartetPlot render_quartet_svg(const QuartetBundle& bundle) {
    constexpr double kPanel = 320.0;
    constexpr double kMargin = 40.0;
    constexpr double kPad = 12.0;
    const auto roles = column_roles(bundle.variant);

    QuartetPlot plot;
    std::ostringstream os;
    const int cols = 2;
    const int rows = static_cast<int>((bundle.members.size() + 1) / 2);
    const double width = cols * (kPanel + kMargin) + kMargin;
    const double height = rows * (kPanel + kMargin) + kMargin;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    for (std::size_t i = 0; i < bundle.members.size(); ++i) {
        const auto& m = bundle.members[i];
        auto x = m.data.column(roles.exposure);
        auto y = m.data.column(roles.outcome);
        const auto fit = fit_ols(m.data, roles.outcome, {roles.exposure});
        const double slope = fit.coefficient(roles.exposure);
        plot.panels.push_back({m.tag, slope, fit.intercept});

        const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
        const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
        const double xmin = *xmin_it, xmax = *xmax_it, ymin = *ymin_it, ymax = *ymax_it;
        const double xspan = xmax > xmin ? xmax - xmin : 1.0;
        const double yspan = ymax > ymin ? ymax - ymin : 1.0;

        const double ox = kMargin + static_cast<double>(i % cols) * (kPanel + kMargin);
        const double oy = kMargin + static_cast<double>(i / cols) * (kPanel + kMargin);
        auto px = [&](double v) { return ox + kPad + (v - xmin) / xspan * (kPanel - 2 * kPad); };
        auto py = [&](double v) { return oy + kPanel - kPad - (v - ymin) / yspan * (kPanel - 2 * kPad); };

        os << "<g class=\"panel\" data-mechanism=\"" << tag_name(m.tag) << "\" data-slope=\"" << format_double(slope)
           << "\">\n";
        os << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << kPanel << "\" height=\"" << kPanel
           << "\" fill=\"#f4f4f4\" stroke=\"#999\"/>\n";
        os << "<text x=\"" << ox << "\" y=\"" << oy - 8 << "\" font-weight=\"bold\">" << dataset_label(m.tag)
           << "</text>\n";
        for (std::size_t r = 0; r < x.size(); ++r) {
            os << "<circle cx=\"" << num(px(x[r])) << "\" cy=\"" << num(py(y[r]))
               << "\" r=\"2.5\" fill=\"black\" fill-opacity=\"0.25\"/>\n";
        }
        os << "<line x1=\"" << num(px(xmin)) << "\" y1=\"" << num(py(fit.intercept + slope * xmin)) << "\" x2=\""
           << num(px(xmax)) << "\" y2=\"" << num(py(fit.intercept + slope * xmax))
           << "\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
        os << "<text class=\"slope\" x=\"" << ox + kPad << "\" y=\"" << oy + 2 * kPad << "\">slope = " << num(slope)
           << "</text>\n";
        os << "<text x=\"" << ox + kPanel / 2 << "\" y=\"" << oy + kPanel + 16 << "\" text-anchor=\"middle\">"
           << roles.exposure << "</text>\n";
        os << "<text x=\"" << ox - 8 << "\" y=\"" << oy + kPanel / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
           << ox - 8 << ' ' << oy + kPanel / 2 << ")\">" << roles.outcome << "</text>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
    plot.svg = os.str();
    return plot;
}

} // namespace quartets
