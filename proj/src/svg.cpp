#include <algorithm>
#include <cmath>
#include <sstream>

#include "declip/assess.hpp"
#include "declip/error.hpp"
#include "declip/io_util.hpp"

namespace declip {

void write_scatter_svg(const EvalReport& report, const std::string& path) {
    if (report.items.empty()) raise(Errc::invalid_argument, "scatter plot needs scored items");
    const int w = 560, h = 420, margin = 56;

    double smin = 1e300, smax = -1e300, mmin = 1e300, mmax = -1e300;
    for (const auto& it : report.items) {
        smin = std::min(smin, it.score);
        smax = std::max(smax, it.score);
        mmin = std::min(mmin, it.mos);
        mmax = std::max(mmax, it.mos);
    }
    if (smax == smin) smax = smin + 1.0;
    if (mmax == mmin) mmax = mmin + 1.0;

    auto sx = [&](double s) { return margin + (s - smin) / (smax - smin) * (w - 2 * margin); };
    auto sy = [&](double m) { return h - margin - (m - mmin) / (mmax - mmin) * (h - 2 * margin); };
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(4);
        os << v;
        return os.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin << "\" y2=\""
        << h - margin << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << h - margin << "\" stroke=\"black\"/>\n";
    for (const auto& it : report.items)
        svg << "<circle cx=\"" << num(sx(it.score)) << "\" cy=\"" << num(sy(it.mos))
            << "\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.6\"/>\n";
    svg << "<text x=\"" << w / 2 << "\" y=\"" << h - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
        << "score</text>\n";
    svg << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << h / 2 << ")\">mos</text>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << margin - 18 << "\" font-size=\"13\">" << report.dataset_name
        << "  srcc=" << (report.srcc ? num(*report.srcc) : std::string("undef"))
        << "  plcc=" << (report.plcc ? num(*report.plcc) : std::string("undef")) << "  n=" << report.n_items
        << "</text>\n";
    svg << "</svg>\n";
    io::write_file(path, svg.str());
}

} // namespace declip
