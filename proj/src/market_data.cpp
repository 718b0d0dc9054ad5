#include "corrfolio/market_data.hpp"

#include "corrfolio/io.hpp"
#include "corrfolio/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace corrfolio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string where(const std::string& asset, const Date& date) {
  return "asset " + asset + " on " + format_date(date);
}

}  // namespace

// ---------------------------------------------------------------------------
// TradingCalendar

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      throw DataError("trading calendar not strictly increasing at " + format_date(dates_[i]));
    }
  }
}

Index TradingCalendar::lower_bound(const Date& date) const {
  return std::lower_bound(dates_.begin(), dates_.end(), date) - dates_.begin();
}

Index TradingCalendar::last_on_or_before(const Date& date) const {
  return (std::upper_bound(dates_.begin(), dates_.end(), date) - dates_.begin()) - 1;
}

std::optional<Index> TradingCalendar::find(const Date& date) const {
  const Index i = lower_bound(date);
  if (i < size() && (*this)[i] == date) return i;
  return std::nullopt;
}

std::vector<Index> TradingCalendar::month_starts() const {
  std::vector<Index> out;
  for (Index d = 0; d < size(); ++d) {
    const auto& cur = (*this)[d];
    if (d == 0 || cur.month() != (*this)[d - 1].month() || cur.year() != (*this)[d - 1].year()) {
      out.push_back(d);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PanelData

PanelData::PanelData(TradingCalendar calendar, std::vector<std::string> asset_ids, Matrix prices,
                     FundamentalPanel fundamentals, BenchmarkSet benchmarks, Vector riskfree,
                     std::vector<std::string> diagnostics)
    : calendar_(std::move(calendar)),
      asset_ids_(std::move(asset_ids)),
      prices_(std::move(prices)),
      fundamentals_(std::move(fundamentals)),
      benchmarks_(std::move(benchmarks)),
      riskfree_(std::move(riskfree)),
      diagnostics_(std::move(diagnostics)) {
  const Index t = calendar_.size();
  const Index n = static_cast<Index>(asset_ids_.size());
  if (t < 2) throw DataError("panel needs at least 2 trading days");
  if (n < 2) throw DataError("panel needs at least 2 assets, got " + std::to_string(n));
  if (prices_.rows() != t || prices_.cols() != n) {
    throw DataError("price matrix does not match calendar x assets");
  }
  for (Index a = 0; a < n; ++a) {
    for (Index d = 0; d < t; ++d) {
      const double p = prices_(d, a);
      if (!(p > 0.0) || !std::isfinite(p)) {
        throw DataError("non-positive or missing price for " + where(asset_ids_[a], calendar_[d]));
      }
    }
  }
  if (riskfree_.size() != t) throw DataError("risk-free series not aligned to calendar");
  for (const auto& [name, series] : benchmarks_.levels) {
    if (series.size() != t) throw DataError("benchmark " + name + " not aligned to calendar");
  }
  if (!fundamentals_.empty()) {
    for (std::size_t f = 0; f < kFundamentalCount; ++f) {
      if (fundamentals_.values[f].rows() != t || fundamentals_.values[f].cols() != n ||
          fundamentals_.age[f].rows() != t || fundamentals_.age[f].cols() != n) {
        throw DataError(std::string("fundamental ") + kFundamentalColumns[f] +
                        " not aligned to panel");
      }
    }
  }

  returns_.resize(t, n);
  returns_.row(0).setConstant(kNaN);
  returns_.bottomRows(t - 1) =
      (prices_.bottomRows(t - 1).array() / prices_.topRows(t - 1).array() - 1.0).matrix();
  excess_ = returns_;
  for (Index d = 1; d < t; ++d) {
    excess_.row(d).array() -= riskfree_(d) / static_cast<double>(kTradingYear);
  }
}

Vector PanelData::benchmark_returns(const std::string& name) const {
  auto it = benchmarks_.levels.find(name);
  if (it == benchmarks_.levels.end()) throw DataError("benchmark " + name + " missing");
  const Vector& level = it->second;
  const Index t = level.size();
  Vector out(t);
  out(0) = kNaN;
  if (name == "Y10") {
    out.tail(t - 1) = level.tail(t - 1) - level.head(t - 1);
  } else {
    out.tail(t - 1) = stats::to_returns(level);
    if (name == "MARKET") {
      out.tail(t - 1) = stats::excess_returns(out.tail(t - 1), riskfree_.tail(t - 1));
    }
  }
  return out;
}

DayRange PanelData::range(const Date& from, const Date& to) const {
  const Index begin = std::max<Index>(calendar_.lower_bound(from), 1);
  const Index end = calendar_.last_on_or_before(to) + 1;
  return DayRange{begin, std::max(begin, end)};
}

Eigen::MatrixXi forward_fill(Matrix& values) {
  Eigen::MatrixXi age = Eigen::MatrixXi::Constant(values.rows(), values.cols(), -1);
  for (Index a = 0; a < values.cols(); ++a) {
    for (Index d = 0; d < values.rows(); ++d) {
      if (!std::isnan(values(d, a))) {
        age(d, a) = 0;
      } else if (d > 0 && age(d - 1, a) >= 0) {
        values(d, a) = values(d - 1, a);
        age(d, a) = age(d - 1, a) + 1;
      }
    }
  }
  return age;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

struct RawPrices {
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> id_index;
  std::map<Date, std::map<std::size_t, double>> by_date;
};

RawPrices read_prices(const std::filesystem::path& path) {
  const auto table = io::read_csv(path, {"date", "asset_id", "close"});
  RawPrices raw;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string ctx = path.string() + ":" + std::to_string(table.line_numbers[r]);
    const Date date = parse_date(row[0]);
    const std::string& id = row[1];
    if (id.empty()) throw DataError(ctx + ": empty asset_id");
    const double close = io::parse_number(row[2], ctx);
    if (!(close > 0.0)) {
      throw DataError("non-positive price " + row[2] + " for " + where(id, date));
    }
    auto [it, inserted] = raw.id_index.emplace(id, raw.ids.size());
    if (inserted) raw.ids.push_back(id);
    if (!raw.by_date[date].emplace(it->second, close).second) {
      throw DataError(ctx + ": duplicate price for " + where(id, date));
    }
  }
  if (raw.ids.empty()) throw DataError(path.string() + ": no price rows");
  return raw;
}

struct RawBenchmarks {
  std::vector<std::string> names;
  std::map<Date, std::map<std::string, double>> by_date;
};

RawBenchmarks read_benchmarks(const std::filesystem::path& path) {
  const auto table = io::read_csv(path, {"date", "name", "close"});
  RawBenchmarks raw;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string ctx = path.string() + ":" + std::to_string(table.line_numbers[r]);
    const Date date = parse_date(row[0]);
    const std::string& name = row[1];
    if (std::find_if(kBenchmarkNames.begin(), kBenchmarkNames.end(),
                     [&](const char* n) { return name == n; }) == kBenchmarkNames.end()) {
      throw DataError(ctx + ": unknown benchmark name '" + name + "'");
    }
    const double close = io::parse_number(row[2], ctx);
    if (name != "Y10" && !(close > 0.0)) {
      throw DataError(ctx + ": non-positive benchmark close for " + name);
    }
    if (seen.insert(name).second) raw.names.push_back(name);
    if (!raw.by_date[date].emplace(name, close).second) {
      throw DataError(ctx + ": duplicate benchmark row for " + name);
    }
  }
  std::sort(raw.names.begin(), raw.names.end());
  return raw;
}

std::map<Date, double> read_riskfree(const std::filesystem::path& path) {
  const auto table = io::read_csv(path, {"date", "annual_yield"});
  std::map<Date, double> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string ctx = path.string() + ":" + std::to_string(table.line_numbers[r]);
    if (!out.emplace(parse_date(row[0]), io::parse_number(row[1], ctx)).second) {
      throw DataError(ctx + ": duplicate risk-free date");
    }
  }
  return out;
}

}  // namespace

PanelData load_panel(const PanelFiles& files, const LoadPolicy& policy) {
  const RawPrices raw = read_prices(files.prices);
  const RawBenchmarks bench = read_benchmarks(files.benchmarks);
  const auto rf = read_riskfree(files.riskfree);

  std::vector<Date> dates;
  for (const auto& [date, row] : raw.by_date) {
    auto b = bench.by_date.find(date);
    if (b == bench.by_date.end() || b->second.size() != bench.names.size()) continue;
    if (rf.count(date) == 0) continue;
    dates.push_back(date);
  }
  if (dates.size() < 2) {
    throw DataError("calendar mismatch: price, benchmark and risk-free dates share " +
                    std::to_string(dates.size()) + " days");
  }
  TradingCalendar calendar(std::move(dates));
  const Index t = calendar.size();

  std::vector<std::string> diagnostics;
  Matrix all(t, static_cast<Index>(raw.ids.size()));
  all.setConstant(kNaN);
  for (Index d = 0; d < t; ++d) {
    for (const auto& [a, close] : raw.by_date.at(calendar[d])) all(d, static_cast<Index>(a)) = close;
  }

  std::vector<std::string> kept_ids;
  std::vector<Index> kept_cols;
  for (Index a = 0; a < all.cols(); ++a) {
    const std::string& id = raw.ids[static_cast<std::size_t>(a)];
    const Index missing = all.col(a).array().isNaN().count();
    int run = 0;
    int longest = 0;
    for (Index d = 0; d < t; ++d) {
      run = std::isnan(all(d, a)) ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    const double frac = static_cast<double>(missing) / static_cast<double>(t);
    if (frac > policy.max_missing_frac) {
      diagnostics.push_back("rejected " + id + ": " + std::to_string(missing) + " of " +
                            std::to_string(t) + " closes missing");
    } else if (std::isnan(all(0, a))) {
      diagnostics.push_back("rejected " + id + ": no close on first calendar day " +
                            format_date(calendar[0]));
    } else if (longest > policy.max_fill_gap) {
      diagnostics.push_back("rejected " + id + ": gap of " + std::to_string(longest) +
                            " consecutive missing closes");
    } else {
      if (missing > 0) {
        diagnostics.push_back("forward-filled " + std::to_string(missing) + " closes for " + id);
      }
      kept_ids.push_back(id);
      kept_cols.push_back(a);
    }
  }
  if (kept_ids.size() < 2) throw DataError("fewer than 2 assets survive missing-data checks");

  const Index n = static_cast<Index>(kept_ids.size());
  Matrix prices(t, n);
  for (Index j = 0; j < n; ++j) prices.col(j) = all.col(kept_cols[static_cast<std::size_t>(j)]);
  forward_fill(prices);

  BenchmarkSet benchmarks;
  for (const auto& name : bench.names) {
    Vector level(t);
    for (Index d = 0; d < t; ++d) level(d) = bench.by_date.at(calendar[d]).at(name);
    benchmarks.levels.emplace(name, std::move(level));
  }
  Vector riskfree(t);
  for (Index d = 0; d < t; ++d) riskfree(d) = rf.at(calendar[d]);

  FundamentalPanel fundamentals;
  if (!files.fundamentals.empty()) {
    const auto table = io::read_csv(files.fundamentals,
                                    {"date", "asset_id", "cap", "mtb", "ev", "div_yield", "ebitda"});
    std::unordered_map<std::string, Index> col_of;
    for (Index j = 0; j < n; ++j) col_of.emplace(kept_ids[static_cast<std::size_t>(j)], j);
    for (auto& m : fundamentals.values) m.setConstant(t, n, kNaN);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      const std::string ctx =
          files.fundamentals.string() + ":" + std::to_string(table.line_numbers[r]);
      const Date date = parse_date(row[0]);
      auto it = col_of.find(row[1]);
      if (it == col_of.end()) continue;
      // A report on a non-trading day becomes visible on the next trading day.
      const Index d = calendar.lower_bound(date);
      if (d >= t) continue;
      for (std::size_t f = 0; f < kFundamentalCount; ++f) {
        const auto v = io::parse_optional_number(row[2 + f], ctx);
        if (!v) continue;
        const auto field = static_cast<Fundamental>(f);
        if ((field == Fundamental::Cap || field == Fundamental::EV) && !(*v > 0.0)) {
          throw DataError(ctx + ": non-positive " + kFundamentalColumns[f] + " for " +
                          where(row[1], date));
        }
        fundamentals.values[f](d, it->second) = *v;
      }
    }
    for (std::size_t f = 0; f < kFundamentalCount; ++f) {
      fundamentals.age[f] = forward_fill(fundamentals.values[f]);
    }
  }

  return PanelData(std::move(calendar), std::move(kept_ids), std::move(prices),
                   std::move(fundamentals), std::move(benchmarks), std::move(riskfree),
                   std::move(diagnostics));
}

void write_panel(const PanelData& panel, const std::filesystem::path& dir) {
  const auto& cal = panel.calendar();
  const auto& ids = panel.asset_ids();
  std::ostringstream prices;
  prices << "date,asset_id,close\n";
  for (Index d = 0; d < panel.days(); ++d) {
    const std::string date = format_date(cal[d]);
    for (Index a = 0; a < panel.assets(); ++a) {
      prices << date << ',' << ids[static_cast<std::size_t>(a)] << ','
             << format_number(panel.prices()(d, a)) << '\n';
    }
  }

  std::ostringstream fund;
  fund << "date,asset_id,cap,mtb,ev,div_yield,ebitda\n";
  const auto& fp = panel.fundamentals();
  if (!fp.empty()) {
    for (Index d = 0; d < panel.days(); ++d) {
      for (Index a = 0; a < panel.assets(); ++a) {
        bool any = false;
        for (std::size_t f = 0; f < kFundamentalCount; ++f) any = any || fp.age[f](d, a) == 0;
        if (!any) continue;
        fund << format_date(cal[d]) << ',' << ids[static_cast<std::size_t>(a)];
        for (std::size_t f = 0; f < kFundamentalCount; ++f) {
          fund << ',';
          if (fp.age[f](d, a) == 0) fund << format_number(fp.values[f](d, a));
        }
        fund << '\n';
      }
    }
  }

  std::ostringstream bench;
  bench << "date,name,close\n";
  for (Index d = 0; d < panel.days(); ++d) {
    for (const char* name : kBenchmarkNames) {
      auto it = panel.benchmarks().levels.find(name);
      if (it == panel.benchmarks().levels.end()) continue;
      bench << format_date(cal[d]) << ',' << name << ',' << format_number(it->second(d)) << '\n';
    }
  }

  std::ostringstream rf;
  rf << "date,annual_yield\n";
  for (Index d = 0; d < panel.days(); ++d) {
    rf << format_date(cal[d]) << ',' << format_number(panel.riskfree()(d)) << '\n';
  }

  io::commit_files(dir, {{"prices.csv", prices.str()},
                         {"fundamentals.csv", fund.str()},
                         {"benchmarks.csv", bench.str()},
                         {"riskfree.csv", rf.str()}});
}

}  // namespace corrfolio
