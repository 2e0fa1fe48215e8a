#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace msv {

using Date = std::chrono::year_month_day;

enum class Underlying { spx, vix };
enum class OptionType { call, put };

[[nodiscard]] Date parse_date(const std::string& text);  ///< YYYY-MM-DD; throws DataError
[[nodiscard]] std::string format_date(Date d);
[[nodiscard]] int days_between(Date from, Date to);
[[nodiscard]] std::string to_string(Underlying u);
[[nodiscard]] std::string to_string(OptionType t);

struct OptionQuote {
  Date trade_date;
  Underlying underlying = Underlying::spx;
  OptionType type = OptionType::call;
  double strike = 0.0;
  Date expiry;
  double mid_price = 0.0;
  double volume = 0.0;
  double underlying_level = 0.0;  ///< SPX close or VIX close on trade_date

  [[nodiscard]] int days_to_expiry() const { return days_between(trade_date, expiry); }
  /// Calendar-day year fraction, days / 365.
  [[nodiscard]] double tau() const { return days_to_expiry() / 365.0; }
};

struct RejectedRow {
  std::size_t line = 0;  ///< 1-based, header is line 1
  std::string reason;    ///< short code, e.g. "expiry_not_after_trade"
  std::string text;
};

struct QuoteSet {
  std::vector<OptionQuote> quotes;
  std::vector<RejectedRow> rejects;
};

/// Column names for each field; defaults are the documented header.
struct CsvSchema {
  std::string date = "date";
  std::string underlying = "underlying";
  std::string type = "type";
  std::string strike = "strike";
  std::string expiry = "expiry";
  std::string price = "price";
  std::string volume = "volume";
  std::string underlying_close = "underlying_close";
};

/// Parses quotes; malformed rows go to rejects. Throws DataError on a
/// missing header or required column.
[[nodiscard]] QuoteSet parse_quotes(std::istream& in, const CsvSchema& schema = {});
/// As parse_quotes; throws DataError if the file cannot be opened.
[[nodiscard]] QuoteSet load_quotes(const std::string& path, const CsvSchema& schema = {});
void write_quotes(std::ostream& out, std::span<const OptionQuote> quotes);
void write_rejects(std::ostream& out, std::span<const RejectedRow> rejects);

struct FilterRules {
  double min_volume = 50.0;
  double min_price = 0.5;
  int min_days_to_expiry = 4;
};

/// Removal counts per rule; a quote failing several rules counts under each.
struct FilterStats {
  std::size_t input = 0;
  std::size_t low_volume = 0;
  std::size_t low_price = 0;
  std::size_t near_expiry = 0;
  std::size_t kept = 0;
};

struct FilterResult {
  std::vector<OptionQuote> kept;
  FilterStats stats;
};

[[nodiscard]] FilterResult apply_filters(std::span<const OptionQuote> quotes, const FilterRules& rules = {});

struct SplitResult {
  std::vector<OptionQuote> train;  ///< trade_date < split_date
  std::vector<OptionQuote> test;   ///< trade_date >= split_date
  std::vector<std::string> warnings;
};

[[nodiscard]] SplitResult split_train_test(std::span<const OptionQuote> quotes, Date split_date);

}  // namespace msv
