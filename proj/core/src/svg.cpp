#include "segbias/svg.hpp"

#include <algorithm>
#include <cmath>

#include "segbias/format.hpp"

namespace segbias::svg {
namespace {

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

std::string num(double v) { return format_sig6(v); }

/// White-to-blue ramp over [0, 1].
std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto channel = [&](double from, double to) {
        return static_cast<int>(std::lround(from + (to - from) * t));
    };
    return "rgb(" + std::to_string(channel(255, 8)) + "," + std::to_string(channel(255, 64)) + "," +
           std::to_string(channel(255, 129)) + ")";
}

std::string header(double width, double height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
           "\" font-family=\"sans-serif\">\n";
}

std::string text_at(double x, double y, const std::string& s, int size,
                    const std::string& extra = "") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
           "\"" + extra + ">" + escape(s) + "</text>\n";
}

}  // namespace

std::string heatmap(const std::vector<std::vector<std::int64_t>>& matrix, const LabelVocab& vocab,
                    const std::string& title) {
    int K = vocab.size();
    double cell = 22.0, left = 120.0, top = 40.0;
    double width = left + K * cell + 20.0;
    double height = top + K * cell + 110.0;
    std::string out = header(width, height);
    out += text_at(10, 22, title, 14, " font-weight=\"bold\"");

    std::int64_t max_count = 0;
    for (const auto& row : matrix)
        for (auto v : row) max_count = std::max(max_count, v);

    for (int a = 0; a < K; ++a) {
        out += text_at(left - 6, top + a * cell + cell * 0.7, vocab.name(a), 10,
                       " text-anchor=\"end\"");
        for (int b = 0; b < K; ++b) {
            double t = max_count > 0 ? static_cast<double>(matrix[a][b]) /
                                           static_cast<double>(max_count)
                                     : 0.0;
            out += "<rect x=\"" + num(left + b * cell) + "\" y=\"" + num(top + a * cell) +
                   "\" width=\"" + num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" + ramp(t) +
                   "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
        }
    }
    for (int b = 0; b < K; ++b) {
        double x = left + b * cell + cell * 0.7;
        double y = top + K * cell + 6.0;
        out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"10\" transform=\"rotate(90 " +
               num(x) + " " + num(y) + ")\">" + escape(vocab.name(b)) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string grouped_bars(const std::vector<std::string>& categories,
                         const std::vector<BarSeries>& series, const std::string& title) {
    double bar = 10.0, gap = 8.0;
    auto group = static_cast<double>(series.size()) * bar + gap;
    double left = 50.0, top = 40.0, plot_h = 220.0;
    double width = left + categories.size() * group + 40.0;
    double height = top + plot_h + 120.0;
    std::string out = header(width, height);
    out += text_at(10, 22, title, 14, " font-weight=\"bold\"");

    double max_value = 0.0;
    for (const auto& s : series)
        for (double v : s.values) max_value = std::max(max_value, v);
    if (max_value <= 0.0) max_value = 1.0;

    for (std::size_t c = 0; c < categories.size(); ++c) {
        for (std::size_t s = 0; s < series.size(); ++s) {
            double v = c < series[s].values.size() ? series[s].values[c] : 0.0;
            double h = plot_h * v / max_value;
            out += "<rect x=\"" + num(left + c * group + s * bar) + "\" y=\"" +
                   num(top + plot_h - h) + "\" width=\"" + num(bar - 1.0) + "\" height=\"" + num(h) +
                   "\" fill=\"" + series[s].color + "\"/>\n";
        }
        double x = left + c * group + 2.0;
        double y = top + plot_h + 10.0;
        out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"9\" transform=\"rotate(60 " +
               num(x) + " " + num(y) + ")\">" + escape(categories[c]) + "</text>\n";
    }
    double lx = left, ly = top + plot_h + 95.0;
    for (const auto& s : series) {
        out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 9.0) +
               "\" width=\"10\" height=\"10\" fill=\"" + s.color + "\"/>\n";
        out += text_at(lx + 14.0, ly, s.name, 11);
        lx += 16.0 + 7.0 * static_cast<double>(s.name.size()) + 18.0;
    }
    out += "</svg>\n";
    return out;
}

std::string longtail(const std::vector<std::pair<std::string, std::int64_t>>& ranked_counts,
                     int highlighted, const std::string& title) {
    double bar = 12.0, left = 50.0, top = 40.0, plot_h = 220.0;
    double width = left + ranked_counts.size() * bar + 40.0;
    double height = top + plot_h + 140.0;
    std::string out = header(width, height);
    out += text_at(10, 22, title, 14, " font-weight=\"bold\"");

    std::int64_t max_count = 1;
    for (const auto& [name, count] : ranked_counts) max_count = std::max(max_count, count);
    for (std::size_t i = 0; i < ranked_counts.size(); ++i) {
        double h = plot_h * static_cast<double>(ranked_counts[i].second) /
                   static_cast<double>(max_count);
        const char* color = static_cast<int>(i) < highlighted ? "#c62828" : "#4878a8";
        out += "<rect x=\"" + num(left + i * bar) + "\" y=\"" + num(top + plot_h - h) +
               "\" width=\"" + num(bar - 2.0) + "\" height=\"" + num(h) + "\" fill=\"" + color +
               "\"/>\n";
        double x = left + i * bar + 2.0;
        double y = top + plot_h + 10.0;
        out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"8\" transform=\"rotate(60 " +
               num(x) + " " + num(y) + ")\">" + escape(ranked_counts[i].first) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace segbias::svg
