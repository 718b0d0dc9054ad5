#include "corrfolio/io.hpp"
#include "corrfolio/market_data.hpp"
#include "corrfolio/stats.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace corrfolio;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("corrfolio_md_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string stamp(const Date& d) { return format_date(d); }

// Benchmarks and risk-free rows for every date in `dates`.
void write_market(const TempDir& dir, const std::vector<Date>& dates) {
  std::ostringstream b;
  std::ostringstream r;
  b << "date,name,close\n";
  r << "date,annual_yield\n";
  double level = 100.0;
  for (const auto& d : dates) {
    level *= 1.001;
    for (const char* name : kBenchmarkNames) {
      b << stamp(d) << ',' << name << ',' << (std::string(name) == "Y10" ? 0.03 : level) << '\n';
    }
    r << stamp(d) << ",0.0252\n";
  }
  dir.write("benchmarks.csv", b.str());
  dir.write("riskfree.csv", r.str());
}

PanelFiles files_in(const TempDir& dir, bool fundamentals = false) {
  return PanelFiles{dir.path / "prices.csv", fundamentals ? dir.path / "fundamentals.csv" : fs::path{},
                    dir.path / "benchmarks.csv", dir.path / "riskfree.csv"};
}

}  // namespace

TEST_CASE("load_panel on complete data") {
  TempDir dir("complete");
  using namespace std::chrono;
  const auto dates = testing::weekdays(year{2020} / 1 / 6, 5);
  std::ostringstream p;
  p << "date,asset_id,close\n";
  for (std::size_t d = 0; d < dates.size(); ++d) {
    for (int a = 0; a < 3; ++a) p << stamp(dates[d]) << ",X" << a << ',' << 10.0 + a + 0.5 * d << '\n';
  }
  dir.write("prices.csv", p.str());
  write_market(dir, dates);
  const PanelData panel = load_panel(files_in(dir));
  CHECK(panel.assets() == 3);
  CHECK(panel.days() == 5);
  CHECK(panel.prices()(4, 2) == doctest::Approx(14.0));
  CHECK(std::isnan(panel.returns()(0, 0)));
  CHECK(panel.returns()(1, 0) == doctest::Approx(10.5 / 10.0 - 1.0).epsilon(1e-15));
  CHECK(panel.excess()(1, 0) == doctest::Approx(10.5 / 10.0 - 1.0 - 0.0252 / 252.0).epsilon(1e-15));
  CHECK(panel.fundamentals().empty());
}

TEST_CASE("load_panel rejects a zero price naming asset and date") {
  TempDir dir("zero");
  using namespace std::chrono;
  const auto dates = testing::weekdays(year{2020} / 1 / 6, 4);
  std::ostringstream p;
  p << "date,asset_id,close\n";
  for (std::size_t d = 0; d < dates.size(); ++d) {
    p << stamp(dates[d]) << ",GOOD,10\n";
    p << stamp(dates[d]) << ",BAD," << (d == 2 ? 0.0 : 5.0) << '\n';
  }
  dir.write("prices.csv", p.str());
  write_market(dir, dates);
  try {
    load_panel(files_in(dir));
    FAIL("expected a data error");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("BAD") != std::string::npos);
    CHECK(msg.find(stamp(dates[2])) != std::string::npos);
  }
}

TEST_CASE("load_panel aligns on the date intersection") {
  TempDir dir("intersect");
  using namespace std::chrono;
  const auto all = testing::weekdays(year{2019} / 1 / 1, 320);
  // Prices on days [0, 300), benchmarks on [50, 320), risk-free everywhere
  // except every 97th day.
  std::vector<Date> price_days(all.begin(), all.begin() + 300);
  std::vector<Date> bench_days(all.begin() + 50, all.end());
  std::ostringstream p;
  p << "date,asset_id,close\n";
  for (const auto& d : price_days) p << stamp(d) << ",A,10\n" << stamp(d) << ",B,20\n";
  dir.write("prices.csv", p.str());
  write_market(dir, bench_days);
  std::ostringstream r;
  r << "date,annual_yield\n";
  std::set<Date> rf_days;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i % 97 == 0) continue;
    r << stamp(all[i]) << ",0.01\n";
    rf_days.insert(all[i]);
  }
  dir.write("riskfree.csv", r.str());

  std::set<Date> expected;
  const std::set<Date> ps(price_days.begin(), price_days.end());
  const std::set<Date> bs(bench_days.begin(), bench_days.end());
  for (const auto& d : all) {
    if (ps.count(d) && bs.count(d) && rf_days.count(d)) expected.insert(d);
  }
  const PanelData panel = load_panel(files_in(dir));
  CHECK(panel.days() == static_cast<Index>(expected.size()));
  CHECK(std::vector<Date>(expected.begin(), expected.end()) == panel.calendar().dates());
}

TEST_CASE("load_panel forward-fills short gaps and rejects sparse assets") {
  TempDir dir("gaps");
  using namespace std::chrono;
  const auto dates = testing::weekdays(year{2021} / 3 / 1, 100);
  std::ostringstream p;
  p << "date,asset_id,close\n";
  for (std::size_t d = 0; d < dates.size(); ++d) {
    p << stamp(dates[d]) << ",FULL," << 10.0 + 0.01 * d << '\n';
    if (d != 40 && d != 41) p << stamp(dates[d]) << ",GAPPY," << 20.0 + d << '\n';
    if (d % 15 != 7) p << stamp(dates[d]) << ",SPARSE,30\n";  // 7 of 100 missing
    if (d < 60 || d > 63) p << stamp(dates[d]) << ",LONGGAP,40\n";
  }
  dir.write("prices.csv", p.str());
  write_market(dir, dates);
  const PanelData panel = load_panel(files_in(dir));
  CHECK(panel.asset_ids() == std::vector<std::string>{"FULL", "GAPPY"});
  CHECK(panel.prices()(40, 1) == doctest::Approx(20.0 + 39));
  CHECK(panel.prices()(41, 1) == doctest::Approx(20.0 + 39));
  const auto& diag = panel.diagnostics();
  auto mentions = [&](const std::string& s) {
    return std::any_of(diag.begin(), diag.end(), [&](const std::string& d) { return d.find(s) != std::string::npos; });
  };
  CHECK(mentions("rejected SPARSE"));
  CHECK(mentions("rejected LONGGAP"));
  CHECK(mentions("GAPPY"));
}

TEST_CASE("fundamentals are forward-filled and reports on holidays move to the next trading day") {
  TempDir dir("fund");
  using namespace std::chrono;
  const auto dates = testing::weekdays(year{2021} / 3 / 1, 10);  // Monday start
  std::ostringstream p;
  p << "date,asset_id,close\n";
  for (const auto& d : dates) p << stamp(d) << ",A,10\n" << stamp(d) << ",B,11\n";
  dir.write("prices.csv", p.str());
  write_market(dir, dates);
  // 2021-03-06 is a Saturday: visible from Monday 2021-03-08 (index 5).
  dir.write("fundamentals.csv",
            "date,asset_id,cap,mtb,ev,div_yield,ebitda\n"
            "2021-03-01,A,100,1.5,120,0.02,10\n"
            "2021-03-06,A,200,,240,,\n");
  const PanelData panel = load_panel(files_in(dir, true));
  const auto& f = panel.fundamentals();
  CHECK(f[Fundamental::Cap](4, 0) == 100.0);
  CHECK(f[Fundamental::Cap](5, 0) == 200.0);
  CHECK(f[Fundamental::MtB](9, 0) == 1.5);
  CHECK(f.reported(Fundamental::Cap, 5, 0));
  CHECK_FALSE(f.reported(Fundamental::MtB, 5, 0));
  CHECK(std::isnan(f[Fundamental::Cap](3, 1)));

  dir.write("fundamentals.csv", "date,asset_id,cap,mtb,ev,div_yield,ebitda\n2021-03-01,A,100,1,-5,0,1\n");
  CHECK_THROWS_AS(load_panel(files_in(dir, true)), DataError);
}

TEST_CASE("malformed inputs") {
  TempDir dir("bad");
  using namespace std::chrono;
  const auto dates = testing::weekdays(year{2021} / 3 / 1, 5);
  write_market(dir, dates);
  dir.write("prices.csv", "date,ticker,close\n2021-03-01,A,1\n");
  CHECK_THROWS_AS(load_panel(files_in(dir)), DataError);
  dir.write("prices.csv", "date,asset_id,close\n2021-13-01,A,1\n");
  CHECK_THROWS_AS(load_panel(files_in(dir)), DataError);
  dir.write("prices.csv", "date,asset_id,close\n2021-03-01,A,abc\n");
  CHECK_THROWS_AS(load_panel(files_in(dir)), DataError);
}

TEST_CASE("write_panel round-trips through load_panel") {
  TempDir dir("roundtrip");
  SynthConfig c;
  c.n_assets = 6;
  c.n_days = 90;
  const PanelData a = generate_synthetic_panel(c, 3);
  write_panel(a, dir.path);
  const PanelData b = load_panel(files_in(dir, true));
  CHECK(b.asset_ids() == a.asset_ids());
  CHECK(b.calendar().dates() == a.calendar().dates());
  CHECK(b.prices() == a.prices());
  CHECK(b.riskfree() == a.riskfree());
  for (const char* name : kBenchmarkNames) CHECK(b.benchmarks().levels.at(name) == a.benchmarks().levels.at(name));
  for (std::size_t f = 0; f < kFundamentalCount; ++f) {
    CHECK(b.fundamentals().age[f] == a.fundamentals().age[f]);
    CHECK(b.fundamentals().values[f].array().isNaN().count() == a.fundamentals().values[f].array().isNaN().count());
  }
}

TEST_CASE("synthetic generator") {
  SynthConfig c;
  c.n_assets = 8;
  c.n_days = 300;
  c.skew_mix = 0.01;
  c.loading_dispersion = 0.3;

  SUBCASE("deterministic per seed") {
    const PanelData a = generate_synthetic_panel(c, 7);
    const PanelData b = generate_synthetic_panel(c, 7);
    const PanelData other = generate_synthetic_panel(c, 8);
    CHECK(a.prices() == b.prices());
    CHECK(a.benchmarks().levels == b.benchmarks().levels);
    CHECK(a.prices() != other.prices());
    CHECK((a.prices().array() > 0.0).all());
  }
  SUBCASE("single factor, no idiosyncratic noise") {
    SynthConfig d;
    d.n_assets = 5;
    d.n_days = 200;
    d.n_factors = 1;
    d.loadings = {1.0};
    d.idio_vol = 0.0;
    const PanelData p = generate_synthetic_panel(d, 9);
    const Vector market = stats::to_returns(p.benchmarks().levels.at("MARKET"));
    for (Index a = 0; a < p.assets(); ++a) {
      CHECK((p.returns().col(a).tail(p.days() - 1) - market).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }
  SUBCASE("config errors") {
    SynthConfig bad = c;
    bad.n_assets = 0;
    CHECK_THROWS_AS(generate_synthetic_panel(bad, 1), ConfigError);
    bad = c;
    bad.n_days = -3;
    CHECK_THROWS_AS(generate_synthetic_panel(bad, 1), ConfigError);
    CHECK_THROWS_AS(parse_synth_config("n_asets = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_synth_config("n_assets = three\n"), ConfigError);
  }
  SUBCASE("config parsing") {
    const SynthConfig p = parse_synth_config(
        "# comment\nn_assets = 12\nn_days=500\nplanted_coeffs = 0.001, -0.002\nnoise_vol = 0.0003\n");
    CHECK(p.n_assets == 12);
    CHECK(p.n_days == 500);
    CHECK(p.planted_coeffs == std::vector<double>{0.001, -0.002});
    CHECK(p.noise_vol == 0.0003);
  }
}

TEST_CASE("planted drift is recovered by least squares on prior-year parameters") {
  SynthConfig c;
  c.n_assets = 200;
  c.n_days = 252 * 6 + 1;
  c.loading_dispersion = 0.3;
  c.idio_dispersion = 0.3;
  c.persistence = 0.5;
  c.planted_coeffs = {0.001, -0.0005};
  c.noise_vol = 0.0003;
  SynthTruth truth;
  generate_synthetic_panel(c, 5, &truth);
  auto z = [](const Vector& x) {
    const double mu = x.mean();
    const double sd = std::sqrt((x.array() - mu).square().mean());
    return Vector((x.array() - mu) / sd);
  };
  const Index years = truth.drift.rows();
  const Index n = c.n_assets;
  Matrix design((years - 1) * n, 3);
  Vector target((years - 1) * n);
  for (Index y = 1; y < years; ++y) {
    design.block((y - 1) * n, 0, n, 1).setOnes();
    design.block((y - 1) * n, 1, n, 1) = z(truth.total_vol.row(y - 1).transpose());
    design.block((y - 1) * n, 2, n, 1) = z(truth.market_beta.row(y - 1).transpose());
    target.segment((y - 1) * n, n) = truth.drift.row(y).transpose();
  }
  const Vector b = design.colPivHouseholderQr().solve(target);
  const Vector resid = target - design * b;
  const double s2 = resid.squaredNorm() / static_cast<double>(target.size() - 3);
  const Matrix cov = s2 * (design.transpose() * design).inverse();
  CHECK(std::abs(b(1) - 0.001) <= 4.0 * std::sqrt(cov(1, 1)));
  CHECK(std::abs(b(2) + 0.0005) <= 4.0 * std::sqrt(cov(2, 2)));
  CHECK(std::sqrt(s2) == doctest::Approx(0.0003).epsilon(0.1));
}

TEST_CASE("calendar helpers") {
  using namespace std::chrono;
  const TradingCalendar cal(testing::weekdays(year{2021} / 1 / 27, 10));  // Wed 27 Jan
  CHECK(cal.month_starts() == std::vector<Index>{0, 3});                    // 1 Feb is day 3
  CHECK(cal.lower_bound(year{2021} / 1 / 30) == 3);
  CHECK(cal.last_on_or_before(year{2021} / 1 / 31) == 2);
  CHECK(cal.find(year{2021} / 2 / 1) == std::optional<Index>{3});
  CHECK_FALSE(cal.find(year{2021} / 1 / 30).has_value());
}
