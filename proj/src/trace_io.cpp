#include "lfso/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>

namespace lfso::cli {

namespace {

constexpr const char* csv_header = "k,f,grad_norm,R,R_tilde,L,step_norm,grad_ratio";

std::string num(double v) { return verify::format_double(v); }

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (const char c : s) {
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

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::vector<double> grad_ratios(const RunTrace<double>& trace)
{
    const auto norms = trace.grad_norms();
    std::vector<double> out(norms.size());
    const double g0 = norms.front();
    for (std::size_t k = 0; k < norms.size(); ++k)
        out[k] = g0 > 0.0 ? norms[k] / g0 : std::numeric_limits<double>::quiet_NaN();
    return out;
}

void write_trace_csv(std::ostream& out, const RunTrace<double>& trace)
{
    const auto ratio = grad_ratios(trace);
    out << csv_header << '\n';
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto& r = trace.records[k];
        out << r.k << ',' << num(r.f_val) << ',' << num(r.grad_norm) << ',' << num(r.r_k) << ','
            << num(r.r_tilde_k) << ',' << num(r.l_k) << ',' << num(r.step_norm) << ',' << num(ratio[k])
            << '\n';
    }
    out << trace.records.size() << ',' << num(trace.final_f) << ',' << num(trace.final_grad_norm)
        << ",nan,nan,nan,nan," << num(ratio.back()) << '\n';
}

std::vector<CsvRow> parse_trace_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw Error(Errc::parse_error, "trace CSV must start with '" + std::string(csv_header) + "'");
    std::vector<CsvRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 8)
            throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": expected 8 columns");
        double v[8];
        for (int i = 0; i < 8; ++i) {
            char* end = nullptr;
            v[i] = std::strtod(cells[i].c_str(), &end);
            if (end == cells[i].c_str() || *end != '\0')
                throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": bad number '" +
                                                   cells[i] + "'");
        }
        rows.push_back({static_cast<long>(v[0]), v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    return rows;
}

void write_svg(std::ostream& out, const std::vector<Series>& series, const std::string& title)
{
    constexpr double width = 800, height = 500;
    constexpr double left = 80, right = 160, top = 40, bottom = 60;
    constexpr double plot_w = width - left - right;
    constexpr double plot_h = height - top - bottom;
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f"};

    std::size_t max_len = 2;
    double y_min = 0.0, y_max = 0.0;
    for (const auto& s : series) {
        max_len = std::max(max_len, s.values.size());
        for (const double v : s.values) {
            if (!(v > 0.0) || !std::isfinite(v))
                break;
            y_min = std::min(y_min, std::log10(v));
            y_max = std::max(y_max, std::log10(v));
        }
    }
    y_min = std::floor(y_min);
    y_max = std::ceil(y_max);
    if (y_max - y_min < 1.0)
        y_min = y_max - 1.0;
    const double x_max = static_cast<double>(max_len - 1);
    auto px = [&](double k) { return left + plot_w * k / x_max; };
    auto py = [&](double ly) { return top + plot_h * (y_max - ly) / (y_max - y_min); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << escape_xml(title) << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double span = y_max - y_min;
    const double y_step = std::max(1.0, std::ceil(span / 10.0));
    for (double ly = y_max; ly >= y_min - 1e-9; ly -= y_step) {
        out << "<line x1=\"" << left << "\" y1=\"" << fixed(py(ly)) << "\" x2=\"" << left + plot_w << "\" y2=\""
            << fixed(py(ly)) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << fixed(py(ly) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" << static_cast<long>(ly)
            << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double k = x_max * i / 5.0;
        out << "<text x=\"" << fixed(px(k)) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << static_cast<long>(std::lround(k)) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">iteration k</text>\n";
    out << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 18 " << top + plot_h / 2
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
           "||grad f(x_k)|| / ||grad f(x_0)||</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = colors[i % (sizeof colors / sizeof *colors)];
        std::size_t n = 0;
        while (n < s.values.size() && s.values[n] > 0.0 && std::isfinite(s.values[n]))
            ++n;
        const std::size_t stride = std::max<std::size_t>(1, n / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < n; k += stride)
            out << fixed(px(static_cast<double>(k))) << ',' << fixed(py(std::log10(s.values[k]))) << ' ';
        if (n > 0 && (n - 1) % stride != 0)
            out << fixed(px(static_cast<double>(n - 1))) << ',' << fixed(py(std::log10(s.values[n - 1])));
        out << "\"/>\n";
        const double ly = top + 20 + 20.0 * static_cast<double>(i);
        out << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 40
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w + 46 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(s.label) << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace lfso::cli
