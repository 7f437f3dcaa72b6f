#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "lba/errors.hpp"
#include "lba/report.hpp"

using namespace lba;
using namespace lba::harness;

namespace {

SweepReport sample_report() {
  SweepReport r;
  r.axis_name = "attack.learning_length";
  r.config_hash = "0123456789abcdef";
  r.seed = 7;
  r.x0_source = "noise_var";
  SweepPoint p;
  p.axis_value = 20;
  p.n_trials = 500;
  p.n_valid = 499;
  p.p_dec = 0.1 + 0.2;
  p.std_error = 1.0 / 3.0;
  p.lb_thm1 = 0.29563104245107;
  p.config_hash = r.config_hash;
  r.points.push_back(p);
  SweepPoint q;
  q.axis_value = 400;
  q.n_trials = 10;
  q.n_valid = 0;
  q.config_hash = r.config_hash;
  r.points.push_back(q);
  return r;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("format names") {
  CHECK(parse_format("csv") == ReportFormat::csv);
  CHECK(parse_format("json") == ReportFormat::json);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("csv") {
  std::ostringstream os;
  write_csv(sample_report(), os);
  std::istringstream is(os.str());
  std::string header, row1, row2;
  std::getline(is, header);
  std::getline(is, row1);
  std::getline(is, row2);
  CHECK(header == kCsvHeader);
  CHECK(row1.find("0.30000000000000004") != std::string::npos);
  CHECK(row2 == "attack.learning_length,400,10,0,,,,,,,,,0123456789abcdef");
}

TEST_CASE("json round trip") {
  const auto r = sample_report();
  std::ostringstream os;
  write_json(r, os);
  CHECK(os.str().find("\"p_fa\": null") != std::string::npos);
  const auto back = parse_json_report(os.str());
  CHECK(back.axis_name == r.axis_name);
  CHECK(back.seed == r.seed);
  CHECK(back.config_hash == r.config_hash);
  REQUIRE(back.points.size() == 2);
  CHECK(*back.points[0].p_dec == *r.points[0].p_dec);
  CHECK(*back.points[0].std_error == *r.points[0].std_error);
  CHECK_FALSE(back.points[0].p_fa);
  CHECK_FALSE(back.points[1].p_dec);
  std::ostringstream again;
  write_json(back, again);
  CHECK(again.str() == os.str());
}

TEST_CASE("long csv") {
  std::ostringstream os;
  write_long_csv(sample_report(), os);
  const std::string s = os.str();
  CHECK(s.rfind("axis_name,axis_value,series,value,stderr\n", 0) == 0);
  CHECK(s.find("p_dec") != std::string::npos);
  CHECK(s.find("lb_thm1") != std::string::npos);
}

TEST_CASE("trajectory csv") {
  TrialOutcome o;
  Trajectory tr(1);
  tr.start(Eigen::VectorXd::Constant(1, 0.5));
  tr.push(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -0.5),
          Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.25), false);
  o.trajectory = tr;
  std::ostringstream os;
  write_trajectory_csv(o, os);
  std::istringstream is(os.str());
  std::string header, r0, r1;
  std::getline(is, header);
  std::getline(is, r0);
  std::getline(is, r1);
  CHECK(header == "k,x,u,y,w,hijacked");
  CHECK(r0 == "0,0.5,0,0.5,0,0");
  CHECK(r1 == "1,1,-0.5,1,0.25,0");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

}  // TEST_SUITE
