#include "msv/error_report.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "msv/errors.hpp"

namespace msv {
namespace {

struct Moments {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double e) {
    ++n;
    sum += e;
    sum_sq += e * e;
  }
  [[nodiscard]] ErrorCell cell() const {
    ErrorCell c;
    c.count = n;
    if (n == 0) return c;
    c.mean = sum / static_cast<double>(n);
    if (n > 1) {
      const double var = (sum_sq - static_cast<double>(n) * c.mean * c.mean) / static_cast<double>(n - 1);
      c.std = std::sqrt(std::max(var, 0.0));
    }
    return c;
  }
};

std::string ratio(const ErrorCell& ours, const ErrorCell& heston) {
  if (heston.count == 0 || ours.count == 0 || heston.mean == 0.0) return "";
  return fmt::format("{:.3g}%", 100.0 * ours.mean / heston.mean);
}

std::string num(const ErrorCell& c, bool use_std) {
  if (c.count == 0) return "";
  return fmt::format("{:.3f}", use_std ? c.std : c.mean);
}

// Rows of the table as string cells, shared by the CSV and text writers.
std::vector<std::vector<std::string>> table(const ErrorReport& ours,
                                            const std::optional<ErrorReport>& heston) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"underlying", "stat"};
  auto labels = bucket_labels(ours.edges);
  labels.push_back("total");
  for (const auto& l : labels) {
    head.push_back(l + " Heston");
    head.push_back(l + " ours");
    head.push_back(l + " o/h");
  }
  rows.push_back(head);
  for (Underlying u : {Underlying::spx, Underlying::vix}) {
    for (bool use_std : {false, true}) {
      std::vector<std::string> row{to_string(u), use_std ? "std" : "mean"};
      for (std::size_t b = 0; b <= ours.bucket_count(); ++b) {
        const ErrorCell& o = ours.cell(u, b);
        row.push_back(heston ? num(heston->cell(u, b), use_std) : "");
        row.push_back(num(o, use_std));
        row.push_back(heston && !use_std ? ratio(o, heston->cell(u, b)) : "");
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

double option_error(double model, double market) { return std::abs(model - market) / (0.1 + market); }

std::size_t ErrorReport::option_count() const {
  std::size_t n = 0;
  for (const auto& row : cells)
    for (std::size_t b = 0; b < bucket_count() && b < row.size(); ++b) n += row[b].count;
  return n;
}

std::size_t maturity_bucket(double tau, std::span<const double> edges) {
  std::size_t b = 0;
  while (b < edges.size() && tau >= edges[b]) ++b;
  return b;
}

std::vector<std::string> bucket_labels(std::span<const double> edges) {
  std::vector<std::string> out;
  if (edges.empty()) return {"all"};
  out.push_back(fmt::format("tau<{:g}", edges.front()));
  for (std::size_t i = 1; i < edges.size(); ++i)
    out.push_back(fmt::format("{:g}<=tau<{:g}", edges[i - 1], edges[i]));
  out.push_back(fmt::format("tau>={:g}", edges.back()));
  return out;
}

ErrorReport error_report(std::span<const double> model_prices, std::span<const OptionQuote> quotes,
                         std::span<const double> edges) {
  if (model_prices.size() != quotes.size())
    throw DataError(fmt::format("error report needs aligned inputs ({} prices, {} quotes)",
                                model_prices.size(), quotes.size()));
  ErrorReport rep;
  rep.edges.assign(edges.begin(), edges.end());
  const std::size_t buckets = rep.bucket_count();
  std::array<std::vector<Moments>, 2> acc{std::vector<Moments>(buckets + 1),
                                          std::vector<Moments>(buckets + 1)};
  for (std::size_t i = 0; i < quotes.size(); ++i) {
    const double e = option_error(model_prices[i], quotes[i].mid_price);
    auto& row = acc[quotes[i].underlying == Underlying::spx ? 0 : 1];
    row[maturity_bucket(quotes[i].tau(), edges)].add(e);
    row[buckets].add(e);
  }
  for (std::size_t u = 0; u < 2; ++u)
    for (const auto& m : acc[u]) rep.cells[u].push_back(m.cell());
  return rep;
}

void write_error_table_csv(std::ostream& os, const ErrorReport& ours,
                           const std::optional<ErrorReport>& heston) {
  for (const auto& row : table(ours, heston)) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void write_error_table_text(std::ostream& os, const ErrorReport& ours,
                            const std::optional<ErrorReport>& heston) {
  const auto rows = table(ours, heston);
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << fmt::format("{:>{}}  ", row[i], width[i]);
    os << '\n';
  }
}

}  // namespace msv
