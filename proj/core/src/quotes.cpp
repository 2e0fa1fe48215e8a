#include "msv/quotes.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "msv/errors.hpp"

namespace msv {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

struct RowError {
  std::string reason;
};

}  // namespace

Date parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  const std::string t = trim(text);
  if (t.size() != 10 || t[4] != '-' || t[7] != '-') throw DataError("bad date '" + text + "'");
  auto field = [&](std::size_t pos, std::size_t len, auto& value) {
    auto [ptr, ec] = std::from_chars(t.data() + pos, t.data() + pos + len, value);
    if (ec != std::errc{} || ptr != t.data() + pos + len) throw DataError("bad date '" + text + "'");
  };
  field(0, 4, y);
  field(5, 2, m);
  field(8, 2, d);
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw DataError("bad date '" + text + "'");
  return date;
}

std::string format_date(Date d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

int days_between(Date from, Date to) {
  return static_cast<int>((std::chrono::sys_days{to} - std::chrono::sys_days{from}).count());
}

std::string to_string(Underlying u) { return u == Underlying::spx ? "SPX" : "VIX"; }
std::string to_string(OptionType t) { return t == OptionType::call ? "call" : "put"; }

QuoteSet parse_quotes(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("quote file has no header");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[lower(header[i])] = i;
  auto column = [&](const std::string& name) {
    auto it = index.find(lower(name));
    if (it == index.end()) throw DataError("missing required column '" + name + "'");
    return it->second;
  };
  const std::size_t c_date = column(schema.date);
  const std::size_t c_und = column(schema.underlying);
  const std::size_t c_type = column(schema.type);
  const std::size_t c_strike = column(schema.strike);
  const std::size_t c_expiry = column(schema.expiry);
  const std::size_t c_price = column(schema.price);
  const std::size_t c_volume = column(schema.volume);
  const std::size_t c_level = column(schema.underlying_close);

  QuoteSet out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    try {
      if (cells.size() < header.size()) throw RowError{"column_count"};
      OptionQuote q;
      try {
        q.trade_date = parse_date(cells[c_date]);
        q.expiry = parse_date(cells[c_expiry]);
      } catch (const DataError&) {
        throw RowError{"bad_date"};
      }
      const std::string und = lower(cells[c_und]);
      if (und == "spx") q.underlying = Underlying::spx;
      else if (und == "vix") q.underlying = Underlying::vix;
      else throw RowError{"bad_underlying"};
      const std::string type = lower(cells[c_type]);
      if (type == "call" || type == "c") q.type = OptionType::call;
      else if (type == "put" || type == "p") q.type = OptionType::put;
      else throw RowError{"bad_type"};
      if (!parse_number(cells[c_strike], q.strike) || !parse_number(cells[c_price], q.mid_price) ||
          !parse_number(cells[c_volume], q.volume) || !parse_number(cells[c_level], q.underlying_level))
        throw RowError{"bad_number"};
      if (!(q.strike > 0.0)) throw RowError{"non_positive_strike"};
      if (!(q.mid_price > 0.0)) throw RowError{"non_positive_price"};
      if (q.volume < 0.0) throw RowError{"negative_volume"};
      if (!(q.underlying_level > 0.0)) throw RowError{"non_positive_level"};
      if (days_between(q.trade_date, q.expiry) <= 0) throw RowError{"expiry_not_after_trade"};
      out.quotes.push_back(q);
    } catch (const RowError& e) {
      out.rejects.push_back({line_no, e.reason, line});
    }
  }
  return out;
}

QuoteSet load_quotes(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open quote file '" + path + "'");
  return parse_quotes(in, schema);
}

void write_quotes(std::ostream& out, std::span<const OptionQuote> quotes) {
  out << "date,underlying,type,strike,expiry,price,volume,underlying_close\n";
  for (const auto& q : quotes) {
    out << fmt::format("{},{},{},{:.10g},{},{:.10g},{:.10g},{:.10g}\n", format_date(q.trade_date),
                       to_string(q.underlying), to_string(q.type), q.strike, format_date(q.expiry),
                       q.mid_price, q.volume, q.underlying_level);
  }
}

void write_rejects(std::ostream& out, std::span<const RejectedRow> rejects) {
  out << "line,reason,text\n";
  for (const auto& r : rejects) out << r.line << ',' << r.reason << ",\"" << r.text << "\"\n";
}

FilterResult apply_filters(std::span<const OptionQuote> quotes, const FilterRules& rules) {
  FilterResult out;
  out.stats.input = quotes.size();
  for (const auto& q : quotes) {
    const bool volume_ok = q.volume >= rules.min_volume;
    const bool price_ok = q.mid_price >= rules.min_price;
    const bool expiry_ok = q.days_to_expiry() >= rules.min_days_to_expiry;
    out.stats.low_volume += !volume_ok;
    out.stats.low_price += !price_ok;
    out.stats.near_expiry += !expiry_ok;
    if (volume_ok && price_ok && expiry_ok) out.kept.push_back(q);
  }
  out.stats.kept = out.kept.size();
  return out;
}

SplitResult split_train_test(std::span<const OptionQuote> quotes, Date split_date) {
  SplitResult out;
  for (const auto& q : quotes) (q.trade_date < split_date ? out.train : out.test).push_back(q);
  if (out.test.empty()) out.warnings.push_back("all quotes trade before " + format_date(split_date) + "; test set is empty");
  if (out.train.empty()) out.warnings.push_back("no quotes trade before " + format_date(split_date) + "; training set is empty");
  return out;
}

}  // namespace msv
