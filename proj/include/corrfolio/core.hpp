#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

namespace corrfolio {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Date = std::chrono::year_month_day;

/// Trading days per year; daily risk-free rate is the annual yield over this.
inline constexpr int kTradingYear = 252;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, missing or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Degenerate numerics (zero variance, singular systems, non-convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Half-open range [begin, end) of calendar day indices.  A day index d
/// addresses the return realized from the close of d-1 to the close of d,
/// so valid return ranges have begin >= 1.
struct DayRange {
  Index begin = 0;
  Index end = 0;

  Index length() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(Index d) const { return d >= begin && d < end; }
  friend bool operator==(const DayRange&, const DayRange&) = default;
};

/// Parses an ISO-8601 calendar date (YYYY-MM-DD).
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

/// Shortest round-trip decimal representation of a double.
std::string format_number(double value);

}  // namespace corrfolio
