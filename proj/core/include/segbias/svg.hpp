#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segbias/types.hpp"

namespace segbias::svg {

/// Count heatmap as a colored rect grid; row = former action (Y axis),
/// column = latter action (X axis).
std::string heatmap(const std::vector<std::vector<std::int64_t>>& matrix, const LabelVocab& vocab,
                    const std::string& title);

struct BarSeries {
    std::string name;
    std::string color;  // CSS color
    std::vector<double> values;
};

/// Grouped bar chart, one group per category label.
std::string grouped_bars(const std::vector<std::string>& categories,
                         const std::vector<BarSeries>& series, const std::string& title);

/// Ranked pair-count bars with the first `highlighted` bars called out.
std::string longtail(const std::vector<std::pair<std::string, std::int64_t>>& ranked_counts,
                     int highlighted, const std::string& title);

}  // namespace segbias::svg
