#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "mdrift/experiment.hpp"

using namespace mdrift;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mdrift_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small(Scenario s) {
  ExperimentConfig c = scenario_defaults(s);
  c.repetitions = 4;
  switch (s) {
    case Scenario::MolchanJ:
      c.copies = 20;
      c.steps = 400;
      c.m_max = 6;
      break;
    case Scenario::BlackScholes:
      c.copies = 20;
      c.steps = 2000;
      c.m_max = 6;
      break;
    case Scenario::Fsv:
      c.copies = 10;
      c.steps = 100;
      c.m_max = 5;
      c.rho_points = 10;
      c.order = 16;
      break;
  }
  c.curve_points = 11;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config("scenario = black-scholes\n# comment\nN = 50  # trailing\nsigma=1\nseed = 9\n");
  CHECK(c.scenario == Scenario::BlackScholes);
  CHECK(c.copies == 50);
  CHECK(c.sigma == 1.0);
  CHECK(c.seed == 9);
  CHECK(c.hurst == 0.5);
  CHECK_FALSE(c.skip_origin);

  CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("N"), ConfigError);
  CHECK_THROWS_AS(parse_config("N = -3"), ConfigError);
  CHECK_THROWS_AS(parse_config("H = abc"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = nope"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("validation") {
  ExperimentConfig c;
  CHECK(validate(c).empty());
  c.hurst = 1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.m_max = 200;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.target = "sin(";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.steps = 100;
  CHECK(validate(c).size() == 1);
  auto bs = scenario_defaults(Scenario::BlackScholes);
  bs.steps = 10001;
  CHECK_THROWS_AS(validate(bs), ConfigError);
}

TEST_CASE("targets") {
  CHECK(target_function("J01")(0.5) == doctest::Approx(2.5));
  CHECK(target_function("J02")(std::exp(-1.0)) == doctest::Approx(10.0));
  CHECK(target_function("J03")(1.0) == doctest::Approx(20.0));
  CHECK(target_function("b")(0.0) == doctest::Approx(1.0));
  CHECK(target_function("zero")(0.3) == 0.0);
  CHECK(target_function("3*t")(2.0) == doctest::Approx(6.0));
}

TEST_CASE("aggregates") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto a = aggregate(v);
  CHECK(a.count == 4);
  CHECK(a.mean == doctest::Approx(2.5));
  CHECK(a.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
}

TEST_CASE("determinism across thread counts") {
  for (Scenario s : {Scenario::MolchanJ, Scenario::BlackScholes, Scenario::Fsv}) {
    CAPTURE(scenario_name(s));
    const auto cfg = small(s);
    const auto a = scratch("det_a"), b = scratch("det_b");
    emit_outputs(run_experiment(cfg, 1), a);
    emit_outputs(run_experiment(cfg, 3), b);
    for (const char* f : {"results.csv", "summary.json", "curves.csv"}) {
      CAPTURE(f);
      const auto x = slurp(a / f);
      CHECK_FALSE(x.empty());
      CHECK(x == slurp(b / f));
    }
    CHECK(fs::exists(a / "timing.json"));
    const auto loaded = load_report(a);
    CHECK(loaded.rows.size() == cfg.repetitions);
    CHECK(loaded.summary["R"] == cfg.repetitions);
    CHECK(loaded.summary["completed"] == cfg.repetitions);
  }
}

TEST_CASE("different seeds differ") {
  auto cfg = small(Scenario::MolchanJ);
  const auto r1 = run_experiment(cfg);
  cfg.seed = 2;
  const auto r2 = run_experiment(cfg);
  CHECK(r1.reps[0].mise_qv != r2.reps[0].mise_qv);
}

TEST_CASE("curves file has one column per estimate up to ten") {
  auto cfg = small(Scenario::MolchanJ);
  cfg.repetitions = 12;
  const auto dir = scratch("curves");
  emit_outputs(run_experiment(cfg), dir);
  std::ifstream in(dir / "curves.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("t,truth,est_1,", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == 11);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) rows += !line.empty();
  CHECK(rows == cfg.curve_points);
}

TEST_CASE("results rows and tampering") {
  const auto cfg = small(Scenario::BlackScholes);
  const auto dir = scratch("tamper");
  const auto report = run_experiment(cfg);
  emit_outputs(report, dir);
  std::ifstream in(dir / "results.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "rep,m_hat,mise_qv,mise_l2,c_cal,sigma_hat,mise_sigma_hat,status");
  for (const auto& r : report.reps) {
    CHECK(r.ok);
    CHECK(r.m_hat >= cfg.m_min);
    CHECK(r.m_hat <= cfg.m_max);
    CHECK(r.sigma_hat > 0.0);
  }
  auto text = slurp(dir / "results.csv");
  const auto pos = text.find('\n', text.find('\n') + 1) + 1;  // start of row 2
  const auto comma = text.find(',', text.find(',', pos) + 1) + 1;  // mise_qv field of row 2
  text.insert(comma, "9");
  std::ofstream(dir / "results.csv", std::ios::binary) << text;
  CHECK_THROWS_AS(load_report(dir), IoError);
}

TEST_CASE("unwritable output") {
  CHECK_THROWS_AS(ensure_writable("/proc/mdrift_no_such_dir/x"), IoError);
  CHECK_THROWS_AS(load_report(scratch("missing")), IoError);
}
