#include <doctest.h>

#include <cmath>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/profiles.hpp"
#include "liouville/report_io.hpp"
#include "liouville/soliton.hpp"

using namespace liouville;

TEST_SUITE("report_io") {

TEST_CASE("solve report round trip") {
  const auto k = builtin("k2");
  auto r = bubble_report(k, 1e-3, {0.6, 0.8});
  r.note = "round trip";
  const Json j = to_json(r);
  const auto back = solve_report_from_json(Json::parse(j.dump()));
  CHECK(back.profile == r.profile);
  CHECK(back.eps == r.eps);
  CHECK(back.xi_eps == r.xi_eps);
  CHECK(back.mu_eps == r.mu_eps);
  CHECK(back.span == r.span);
  CHECK(back.phi.x == r.phi.x);
  CHECK(back.phi.values == r.phi.values);
  CHECK(back.phi.tail.kind == r.phi.tail.kind);
  CHECK(back.note == r.note);
  CHECK(to_json(back).dump() == j.dump());

  const auto p1 = pohozaev_check(r, k), p2 = pohozaev_check(back, k);
  CHECK(to_json(p1).dump() == to_json(p2).dump());
}

TEST_CASE("key order is stable") {
  const auto r = bubble_report(builtin("k1"), 0.0, {1.0, 0.0});
  const Json j = to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  REQUIRE(keys.size() > 4);
  CHECK(keys[0] == "profile");
  CHECK(keys[1] == "eps");
  CHECK(keys[2] == "seed");
  CHECK(keys.back() == "note");
}

TEST_CASE("malformed reports are rejected") {
  const auto r = bubble_report(builtin("k1"), 0.0, {1.0, 0.0});
  Json j = to_json(r);
  j.erase("mu_eps");
  CHECK_THROWS_AS(solve_report_from_json(j), ValidationError);
  j = to_json(r);
  j["eps"] = "small";
  CHECK_THROWS_AS(solve_report_from_json(j), ValidationError);
  j = to_json(r);
  j["phi"]["values"].erase(0);
  CHECK_THROWS_AS(solve_report_from_json(j), ValidationError);
  CHECK_THROWS_AS(solve_report_from_json(Json::array()), ValidationError);
}

TEST_CASE("non-finite numbers become null") {
  CriticalPoint c;
  c.det = NAN;
  CHECK(to_json(c)["det"].is_null());
}

TEST_CASE("csv") {
  std::ostringstream os;
  write_csv(os, {"x", "y"}, {{0.1, 1.0 / 3.0}, {2.0, -1e-300}});
  CHECK(os.str() == "x,y\n0.10000000000000001,2\n0.33333333333333331,-1e-300\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(write_csv(os, {"x"}, {{1.0}, {2.0}}), ValidationError);
  CHECK_THROWS_AS(write_csv(os, {"x", "y"}, {{1.0}, {2.0, 3.0}}), ValidationError);
  CHECK_THROWS_AS(write_csv("/nonexistent/dir/out.csv", {"x"}, {{1.0}}), ValidationError);
}

}
