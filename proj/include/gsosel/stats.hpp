#pragma once

#include <optional>
#include <span>
#include <vector>

namespace gsosel {

double mean(std::span<const double> x);
/// Sample standard deviation (n − 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> x);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> x);

/// Spearman rank correlation (Pearson on average ranks). Empty when the
/// series are shorter than 2 or either one is constant.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

}  // namespace gsosel
