#include <filesystem>

#include "doctest.h"
#include "metra/commands.hpp"
#include "metra/error.hpp"

using namespace metra;

namespace {

const std::filesystem::path kRoot = METRA_SOURCE_DIR;

CommandResult run(const Workspace& ws, const std::string& text) { return run_command(ws, parse_command(text, ws)); }

}  // namespace

TEST_CASE("gh of a space with itself is zero") {
  Workspace ws = load_workspace(kRoot / "workspaces/tour.metra");
  for (const char* x : {"X", "Pt", "Two", "Sum", "A"}) {
    auto r = run(ws, std::string("gh ") + x + " " + x);
    REQUIRE(r.status == "ok");
    CHECK(r.result["distance"] == "0");
  }
  CHECK(run(ws, "gh X Pt").result["distance"] == "1");
}

TEST_CASE("grid decomposition certificate") {
  Workspace ws = load_workspace(kRoot / "tests/data/grid.metra");
  auto r = run(ws, "decompose Grid by theta1 theta2");
  REQUIRE(r.status == "ok");
  CHECK(r.result["certificate"]["ok"] == true);
  CHECK(r.result["isomorphism"].size() == 9);
  CHECK(r.result["left"]["carrier"].size() == 3);
  CHECK(run(ws, "permutable theta1 theta2").result["permutable"] == true);
  auto bad = run(ws, "decompose Grid by theta1 theta1");
  CHECK(bad.status == "fail");
  CHECK(bad.result["verdict"]["code"] == "meet");
}

TEST_CASE("principal reduced products recover the factor") {
  Workspace ws = load_workspace(kRoot / "workspaces/tour.metra");
  auto r = run(ws, "redprod [Two, Sum] by principal(1)");
  REQUIRE(r.status == "ok");
  CHECK(r.result["core"] == Json::array({"Two"}));
  CHECK(r.result["isomorphism"].size() == 2);
  auto s = run(ws, "redprod [Two, Sum] by principal(2)");
  REQUIRE(s.status == "ok");
  CHECK(s.result["isomorphism"].size() == 3);
}

TEST_CASE("tour workspace verdicts") {
  Workspace ws = load_workspace(kRoot / "workspaces/tour.metra");
  auto results = run_all(ws);
  REQUIRE(results.size() == ws.commands.size());
  std::map<std::string, std::string> status;
  for (const auto& r : results) status[r.command] = r.status;
  CHECK(status["kernel m"] == "ok");
  CHECK(status["sat Two Idem"] == "ok");
  CHECK(status["sat Sum Idem"] == "fail");
  CHECK(status["closure Idem [Two, Sum]"] == "ok");
  CHECK(status["limitmetric {a, b, c} [[0, 1/n, 1], [1/n, 0, 1], [1, 1, 0]] against A"] == "fail");
  for (const auto& r : results) CHECK(r.status != "error");
}

TEST_CASE("results are deterministic") {
  Workspace ws = load_workspace(kRoot / "workspaces/tour.metra");
  std::string first = report_json(ws, run_all(ws)).dump();
  std::string second = report_json(ws, run_all(ws)).dump();
  CHECK(first == second);
  CHECK(report_text(ws, run_all(ws)) == report_text(ws, run_all(ws)));
  Json j = Json::parse(first);
  CHECK(j["schema"] == 1);
  CHECK(j["limits"]["valuations"] == 100000);
}

TEST_CASE("errors are reported as data") {
  Workspace ws = load_workspace(kRoot / "workspaces/tour.metra");
  ws.limits.correspondences = 2;
  auto r = run(ws, "gh X X");
  CHECK(r.status == "error");
  CHECK(r.resource);
  CHECK(r.error_kind == "resource");
  CHECK(r.to_json()["resource_cap"] == true);

  Workspace bad = parse_workspace(R"(
algebra A { carrier a, b; metric [[0, 1/2], [1/2, 0]]; }
algebra B { carrier x, y; metric [[0, 1], [1, 0]]; }
map f from A to B { a -> x; b -> y; }
kernel f;
)");
  auto k = run_command(bad, bad.commands[0]);
  CHECK(k.status == "error");
  CHECK(k.error_kind == "homomorphism");
  CHECK_FALSE(k.resource);
}
