#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "metra/error.hpp"
#include "metra/json_io.hpp"
#include "metra/workspace.hpp"

using namespace metra;

namespace {

const std::filesystem::path kRoot = METRA_SOURCE_DIR;

Json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

std::string error_of(const std::string& text) {
  try {
    parse_workspace(text);
  } catch (const Error& e) {
    return e.kind() + " " + e.what();
  }
  return "";
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("metra-ws-" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path / name) << text; }
};

const char* kSmall = R"(
signature S { sigma/2; }
algebra A over S {
  carrier a, b;
  metric [[0, 1], [1, 0]];
  op sigma = table {a, b, b, b};
}
)";

}  // namespace

TEST_CASE("empty input gives the empty workspace") {
  CHECK(parse_workspace("") == Workspace{});
  CHECK(parse_workspace("  # only a comment\n// and another\n") == Workspace{});
  CHECK(serialize_workspace(Workspace{}).empty());
}

TEST_CASE("workspace files round-trip through the DSL and JSON") {
  for (const char* name : {"tests/data/grid.metra", "workspaces/tour.metra"}) {
    CAPTURE(name);
    Workspace ws = load_workspace(kRoot / name);
    CHECK(parse_workspace(serialize_workspace(ws)) == ws);
    CHECK(serialize_workspace(parse_workspace(serialize_workspace(ws))) == serialize_workspace(ws));
    Json j = workspace_to_json(ws);
    CHECK(workspace_from_json(j) == ws);
    CHECK(workspace_from_json(Json::parse(j.dump())) == ws);
    for (const auto& c : ws.commands) CHECK(parse_command(c.str(), ws) == c);
  }
}

TEST_CASE("grid workspace matches its golden JSON") {
  Workspace ws = load_workspace(kRoot / "tests/data/grid.metra");
  Json golden = read_json(kRoot / "tests/data/grid.json");
  CHECK(workspace_to_json(ws) == golden);
  CHECK(workspace_from_json(golden) == ws);
  CHECK(ws.algebras.size() == 2);
  CHECK(ws.congruences.size() == 2);
  CHECK(ws.commands.size() == 8);
}

TEST_CASE("declarations") {
  Workspace ws = parse_workspace(std::string(kSmall) + R"(
space X { points p, q; metric [[0, inf], [inf, 0]]; }
congruence T on A { matrix [[0, 1/2], [1/2, 0]]; }
map id from A to A { a -> a; b -> b; }
filter F on {1, 2, 3} family {{1, 2}, {1, 2, 3}};
axioms E over S { sigma(x,y) =[0] sigma(y,x); d(x,y) <= 1; }
presentation P over S { vars x, y; mode LIP(sigma=2); depth 1; rel x =[1/2] y; }
limits { terms = 500; subsets = 64; }
)");
  CHECK(ws.signature("S").arity("sigma") == 2);
  CHECK(ws.algebra("A").algebra->size() == 2);
  CHECK(ws.space("X")(0, 1).is_infinite());
  CHECK(ws.space("A")(0, 1) == ExtRational(1));
  CHECK(ws.congruence("T").matrix(0, 1) == ExtRational(1, 2));
  CHECK(ws.map("id").images == std::vector<std::size_t>{0, 1});
  CHECK(ws.filter("F").filter.core() == std::vector<std::size_t>{0, 1});
  CHECK(ws.formula_set("E").implications.size() == 1);
  CHECK(ws.formula_set("E").inequalities.size() == 1);
  CHECK(ws.presentation("P").presentation.mode.constant("sigma") == ExtRational(2));
  CHECK(ws.limits.terms == 500);
  CHECK(ws.limits.subsets == 64);
  CHECK_THROWS_AS(ws.algebra("B"), ReferenceError);
  CHECK(parse_workspace(serialize_workspace(ws)) == ws);
}

TEST_CASE("errors carry positions") {
  std::string arity = error_of("signature S { sigma/2; }\naxioms E over S { sigma(x) =[0] x; }");
  CHECK(arity.rfind("signature 2:19:", 0) == 0);

  CHECK(error_of("signature S { sigma/2 }\nalgebra A over S {\n  carrier a\n}").rfind("parse 4:1:", 0) == 0);
  CHECK(error_of("algebra A over S { }").rfind("reference 1:16: unknown signature 'S'", 0) == 0);
  CHECK(error_of(std::string(kSmall) + "space A { points p; metric [[0]]; }").find("duplicate name 'A'") !=
        std::string::npos);
  CHECK(error_of(std::string(kSmall) + "quotient A by T;").rfind("reference 8:15:", 0) == 0);
  CHECK(error_of(std::string(kSmall) + "congruence T on A { matrix [[0, 2], [2, 0]]; }").rfind("congruence", 0) ==
        0);
  CHECK(error_of("algebra A { carrier a, b; metric [[0, 1], [2, 0]]; }").rfind("axiom", 0) == 0);
  CHECK(error_of("signature S { g/1; }\nalgebra A over S { carrier a; metric [[0]]; op g = table {a, a}; }")
            .find("expected 1") != std::string::npos);
  CHECK(error_of("algebra A { carrier a; metric [[0]]; }\nredprod [A] by principal(2);").rfind("parse", 0) == 0);
  CHECK(error_of("limits { speed = 3; }").rfind("parse 1:10:", 0) == 0);
  CHECK(error_of("frobnicate X;").rfind("parse 1:1:", 0) == 0);
}

TEST_CASE("includes") {
  TempDir dir;
  dir.write("base.metra", kSmall);
  dir.write("main.metra", "include \"base.metra\";\nvalidate A;\n");
  Workspace ws = load_workspace(dir.path / "main.metra");
  CHECK(ws.algebras.size() == 1);
  CHECK(ws.commands.size() == 1);
  CHECK(ws == parse_workspace("include \"base.metra\"; validate A;", dir.path));

  dir.write("loop1.metra", "include \"loop2.metra\";\n");
  dir.write("loop2.metra", "include \"loop1.metra\";\n");
  CHECK_THROWS_AS(load_workspace(dir.path / "loop1.metra"), ParseError);
  CHECK_THROWS_AS(parse_workspace("include \"missing.metra\";", dir.path), ParseError);
  CHECK_THROWS_AS(load_workspace(dir.path / "absent.metra"), DomainError);
}

TEST_CASE("limit overrides") {
  Limits l;
  apply_limit_overrides(l, "valuations=10,sections=3");
  CHECK(l.valuations == 10);
  CHECK(l.sections == 3);
  apply_limit_overrides(l, "");
  CHECK(l.valuations == 10);
  CHECK_THROWS_AS(apply_limit_overrides(l, "speed=1"), DomainError);
  CHECK_THROWS_AS(apply_limit_overrides(l, "terms=-1"), DomainError);
  CHECK_THROWS_AS(apply_limit_overrides(l, "terms"), DomainError);
}

TEST_CASE("malformed JSON documents") {
  Workspace ws = load_workspace(kRoot / "tests/data/grid.metra");
  Json j = workspace_to_json(ws);
  j["schema"] = 2;
  CHECK_THROWS_AS(workspace_from_json(j), DomainError);
  Json k = workspace_to_json(ws);
  k.erase("algebras");
  CHECK_THROWS_AS(workspace_from_json(k), DomainError);
}
