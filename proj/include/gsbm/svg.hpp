#pragma once

#include <span>
#include <string>
#include <vector>

namespace gsbm {

/// Square heatmap of an n x n row-major matrix with rows and columns taken
/// in `order`. Cells are shaded white to dark blue over [lo, hi].
std::string heatmap_svg(std::span<const double> values, std::size_t n,
                        std::span<const std::size_t> order, double lo, double hi,
                        const std::string& title);

/// Step plot of an integer series against iteration.
std::string trace_svg(std::span<const std::size_t> series, const std::string& title,
                      std::size_t burn_in = 0);

/// Node order that groups nodes by label, keeping index order within groups.
std::vector<std::size_t> order_by_label(std::span<const std::size_t> labels);

}  // namespace gsbm
