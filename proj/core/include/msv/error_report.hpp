#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msv/quotes.hpp"

namespace msv {

/// Maturity bucket edges (years): tau < 0.05, [0.05, 0.1), [0.1, 0.2), >= 0.2.
inline constexpr std::array<double, 3> kMaturityEdges{0.05, 0.1, 0.2};

/// Per-option error |model - market| / (0.1 + market).
[[nodiscard]] double option_error(double model, double market);

struct ErrorCell {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation; 0 for fewer than two options
};

/// Cells per underlying (SPX first, VIX second); each row holds one cell per
/// bucket followed by the all-maturity total.
struct ErrorReport {
  std::vector<double> edges;
  std::array<std::vector<ErrorCell>, 2> cells;

  [[nodiscard]] std::size_t bucket_count() const { return edges.size() + 1; }
  [[nodiscard]] const ErrorCell& cell(Underlying u, std::size_t bucket) const {
    return cells[u == Underlying::spx ? 0 : 1][bucket];
  }
  [[nodiscard]] const ErrorCell& total(Underlying u) const { return cell(u, bucket_count()); }
  /// Options counted across buckets (totals excluded).
  [[nodiscard]] std::size_t option_count() const;
};

[[nodiscard]] std::size_t maturity_bucket(double tau, std::span<const double> edges);
[[nodiscard]] std::vector<std::string> bucket_labels(std::span<const double> edges);

/// Throws DataError if the spans differ in length.
[[nodiscard]] ErrorReport error_report(std::span<const double> model_prices,
                                       std::span<const OptionQuote> quotes,
                                       std::span<const double> edges = kMaturityEdges);

/// Appendix-style table: for each underlying a mean row and a std row; per
/// bucket and for the total, columns Heston, ours and o/h. With a single
/// report only the "ours" columns are filled.
void write_error_table_csv(std::ostream& os, const ErrorReport& ours,
                           const std::optional<ErrorReport>& heston = std::nullopt);
void write_error_table_text(std::ostream& os, const ErrorReport& ours,
                            const std::optional<ErrorReport>& heston = std::nullopt);

}  // namespace msv
