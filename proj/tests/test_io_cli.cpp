#include <eqfred/cli.hpp>
#include <eqfred/io.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eqfred;
using io::json;

namespace {

const std::string kFixtures = EQFRED_FIXTURES;

std::string fixture(const std::string &name) { return kFixtures + "/" + name; }

json load(const std::string &name) {
    std::ifstream in(fixture(name));
    return json::parse(in);
}

std::string write_temp(const json &doc, const std::string &name) {
    const auto path = std::filesystem::temp_directory_path() / ("eqfred_test_" + name);
    std::ofstream(path) << doc.dump();
    return path.string();
}

cli::Command command(cli::Verb verb, std::string input = {}) {
    cli::Command c;
    c.verb = verb;
    c.input = std::move(input);
    return c;
}

std::string pointer_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const io::DocumentError &e) {
        return e.pointer();
    }
    return "<no error>";
}

} // namespace

TEST(DumpCanonical, SortedKeysAndSeventeenDigits) {
    const json j{{"b", 0.1}, {"a", {{"z", 1}, {"y", 2.0}}}, {"c", json::array({1, 2})}};
    EXPECT_EQ(io::dump_canonical(j),
              "{\n  \"a\": {\n    \"y\": 2.0,\n    \"z\": 1\n  },\n  \"b\": "
              "0.10000000000000001,\n  \"c\": [1, 2]\n}\n");
}

TEST(DumpCanonical, NonFiniteBecomesNull) {
    const json j{{"x", std::numeric_limits<double>::infinity()},
                 {"y", std::numeric_limits<double>::quiet_NaN()}};
    EXPECT_EQ(io::dump_canonical(j), "{\n  \"x\": null,\n  \"y\": null\n}\n");
}

TEST(DumpCanonical, RoundTripsDoublesExactly) {
    for (double v : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.5}) {
        const auto s = io::dump_canonical(json{{"v", v}});
        EXPECT_EQ(json::parse(s)["v"].get<double>(), v);
    }
}

TEST(ParseRep, RegularZ3Fixture) {
    const auto rep = io::parse_rep(load("regular_z3.json"));
    EXPECT_EQ(rep.dim(), 3);
    EXPECT_EQ(rep.group().order(), 3);
    const auto back = io::parse_rep(io::to_json(rep));
    for (size_t i = 0; i < rep.matrices().size(); ++i)
        EXPECT_EQ((back.matrices()[i] - rep.matrices()[i]).norm(), 0.0);
}

TEST(ParseRep, PointeredDiagnostics) {
    json doc = load("regular_z3.json");
    json d = doc;
    d.erase("dim");
    EXPECT_EQ(pointer_of([&] { io::parse_rep(d); }), "/dim");
    d = doc;
    d["matrices"]["1"][2][0] = json::array({1.0});
    EXPECT_EQ(pointer_of([&] { io::parse_rep(d); }), "/matrices/1/2/0");
    d = doc;
    d["matrices"].erase("2");
    EXPECT_EQ(pointer_of([&] { io::parse_rep(d); }), "/matrices/2");
    d = doc;
    d["group"]["orders"][0] = 0;
    EXPECT_EQ(pointer_of([&] { io::parse_rep(d); }), "/group/orders/0");
    d = doc;
    d["matrices"]["7"] = d["matrices"]["1"];
    EXPECT_EQ(pointer_of([&] { io::parse_rep(d); }), "/matrices/7");
    d = doc;
    d["matrices"]["1"] = d["matrices"]["0"];
    EXPECT_EQ(pointer_of([&] { io::parse_rep(d); }), "/matrices");
}

TEST(ParseBundle, FixturesParseAndValidate) {
    for (const auto *name : {"identity_symbol.json", "fixed_point_diag01.json"}) {
        const auto doc = io::parse_bundle_document(load(name));
        EXPECT_TRUE(validate_bundle(doc.bundle).ok());
        ASSERT_TRUE(doc.symbol.has_value());
    }
}

TEST(ParseBundle, PointeredDiagnostics) {
    const json doc = load("identity_symbol.json");
    json d = doc;
    d["action"]["1"]["b"] = "q";
    EXPECT_EQ(pointer_of([&] { io::parse_bundle_document(d); }), "/action/1/b");
    d = doc;
    d["transport"]["1"].erase("c");
    EXPECT_EQ(pointer_of([&] { io::parse_bundle_document(d); }), "/transport/1/c");
    d = doc;
    d["symbol"]["a"] = json::array();
    EXPECT_EQ(pointer_of([&] { io::parse_bundle_document(d); }), "/symbol/a");
    d = doc;
    d["base"].erase("a");
    EXPECT_EQ(pointer_of([&] { io::parse_bundle_document(d); }), "/base/a");
    d = doc;
    d["points"].push_back("a");
    EXPECT_EQ(pointer_of([&] { io::parse_bundle_document(d); }), "/points/3");
    d = doc;
    d["action"]["0,1"] = d["action"]["0"];
    EXPECT_EQ(pointer_of([&] { io::parse_bundle_document(d); }), "/action/0,1");
}

TEST(ParseBundle, TwoBundleFormIsDoubled) {
    json d = load("fixed_point_diag01.json");
    d["target_fiber_dim"] = d["fiber_dim"];
    d["target_transport"] = d["transport"];
    const auto doc = io::parse_bundle_document(d);
    ASSERT_TRUE(doc.symbol.has_value());
    EXPECT_EQ(doc.symbol->bundle.fiber_dim[0], 4);
    EXPECT_TRUE(validate_bundle(doc.symbol->bundle).ok());
    const Group &z2 = doc.bundle.group;
    EXPECT_FALSE(alpha_elliptic_check(*doc.symbol, Character(z2, {0})).verdict);
    EXPECT_TRUE(alpha_elliptic_check(*doc.symbol, Character(z2, {1})).verdict);

    d["symbol"]["xi0"] = json::array({json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})})});
    EXPECT_EQ(pointer_of([&] { io::parse_bundle_document(d); }), "/symbol/xi0");
}

TEST(Cli, CheckIdentityExitsZeroForEveryAlpha) {
    for (int a : {0, 1}) {
        auto c = command(cli::Verb::check, fixture("identity_symbol.json"));
        c.alpha = std::vector<int>{a};
        const auto r = cli::run(c);
        EXPECT_EQ(r.exit_code, 0) << r.diagnostic;
        EXPECT_TRUE(json::parse(r.report)["verdict"].get<bool>());
    }
}

TEST(Cli, CheckFixedPointFailureNamesTheOffendingPoint) {
    auto c = command(cli::Verb::check, fixture("fixed_point_diag01.json"));
    c.alpha = std::vector<int>{0};
    const auto r = cli::run(c);
    EXPECT_EQ(r.exit_code, 2);
    const auto report = json::parse(r.report);
    ASSERT_EQ(report["offending"].size(), 1u);
    EXPECT_EQ(report["offending"][0]["point"], "xi0");
    EXPECT_EQ(report["offending"][0]["rho"], json::array({0}));
    c.alpha = std::vector<int>{1};
    EXPECT_EQ(cli::run(c).exit_code, 0);
}

TEST(Cli, DecomposeRegularZ3) {
    const auto r = cli::run(command(cli::Verb::decompose, fixture("regular_z3.json")));
    ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
    const auto report = json::parse(r.report);
    ASSERT_EQ(report["multiplicities"].size(), 3u);
    for (const auto &e : report["multiplicities"])
        EXPECT_EQ(e["multiplicity"], 1);
}

TEST(Cli, InduceReportsFrobeniusTable) {
    const auto r = cli::run(command(cli::Verb::induce, fixture("induce_sign_z2_in_z4.json")));
    ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
    const auto report = json::parse(r.report);
    EXPECT_TRUE(report["consistent"].get<bool>());
    EXPECT_EQ(report["induced"]["dim"], 2);
    for (const auto &e : report["multiplicities"]) {
        const int a = e["character"][0];
        EXPECT_EQ(e["multiplicity"], a % 2 == 1 ? 1 : 0);
        EXPECT_EQ(e["expected"], e["multiplicity"]);
    }
}

TEST(Cli, PrimListsOrbits) {
    const auto r = cli::run(command(cli::Verb::prim, fixture("identity_symbol.json")));
    ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
    const auto report = json::parse(r.report);
    EXPECT_EQ(report["orbit_count"], 3);
    EXPECT_EQ(report["fibers"].size(), 2u);
    EXPECT_EQ(report["minimal_isotropy"], json::array({json::array({0})}));
}

TEST(Cli, BvpAndSweep) {
    auto b = command(cli::Verb::bvp);
    b.bc = cli::parse_bc("D,N");
    b.sizes = {64, 128};
    auto r = cli::run(b);
    ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
    auto report = json::parse(r.report);
    EXPECT_EQ(report["table"].size(), 2u);
    EXPECT_NEAR(report["convergence_orders"][0].get<double>(), 2.0, 0.3);

    auto s = command(cli::Verb::sweep);
    s.scenario = "alpha-elliptic";
    s.alpha = std::vector<int>{0};
    r = cli::run(s);
    ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
    report = json::parse(r.report);
    EXPECT_EQ(report["verdict"], "degenerating");
    EXPECT_EQ(report["scenario"], "alpha-elliptic");
    EXPECT_EQ(report["parameters"]["sizes"], json::array({32, 64, 128}));
}

TEST(Cli, ErrorsExitOneWithDiagnostic) {
    auto c = command(cli::Verb::check, fixture("identity_symbol.json"));
    auto r = cli::run(c);  // no alpha
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_FALSE(r.diagnostic.empty());

    c.alpha = std::vector<int>{5};
    EXPECT_EQ(cli::run(c).exit_code, 1);

    c.alpha = std::vector<int>{0};
    c.tol = -1.0;
    EXPECT_EQ(cli::run(c).exit_code, 1);

    EXPECT_EQ(cli::run(command(cli::Verb::decompose, "/nonexistent.json")).exit_code, 1);

    json bad = load("regular_z3.json");
    bad["matrices"]["1"][0][0] = "x";
    r = cli::run(command(cli::Verb::decompose, write_temp(bad, "bad_rep.json")));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.diagnostic.find("/matrices/1/0/0"), std::string::npos) << r.diagnostic;

    const auto path = std::filesystem::temp_directory_path() / "eqfred_test_garbage.json";
    std::ofstream(path) << "{ not json";
    r = cli::run(command(cli::Verb::decompose, path.string()));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.diagnostic.find("parse error"), std::string::npos);

    auto s = command(cli::Verb::sweep);
    s.scenario = "nonsense";
    s.alpha = std::vector<int>{0};
    EXPECT_EQ(cli::run(s).exit_code, 1);
}

TEST(Cli, ArgumentParsers) {
    EXPECT_EQ(cli::parse_int_list("1,2,3"), (std::vector<int>{1, 2, 3}));
    EXPECT_THROW(cli::parse_int_list("1,,2"), Error);
    EXPECT_THROW(cli::parse_int_list("1x"), Error);
    EXPECT_THROW(cli::parse_int_list(""), Error);
    EXPECT_EQ(cli::parse_bc("N,D"),
              (BoundaryPair{BoundaryCondition::neumann, BoundaryCondition::dirichlet}));
    EXPECT_THROW(cli::parse_bc("D"), Error);
    EXPECT_THROW(cli::parse_bc("D,Q"), Error);
    EXPECT_EQ(cli::parse_verb("prim"), cli::Verb::prim);
    EXPECT_FALSE(cli::parse_verb("frobnicate").has_value());
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    auto c = command(cli::Verb::check, fixture("fixed_point_diag01.json"));
    c.alpha = std::vector<int>{0};
    const auto a = cli::run(c), b = cli::run(c);
    EXPECT_EQ(a.report, b.report);
    EXPECT_EQ(a.exit_code, b.exit_code);
}

#ifdef EQFRED_CLI
TEST(CliBinary, ExitCodes) {
    const std::string bin = EQFRED_CLI;
    auto status = [&](const std::string &args) {
        const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    EXPECT_EQ(status("check --input " + fixture("identity_symbol.json") + " --alpha 1"), 0);
    EXPECT_EQ(status("check --input " + fixture("fixed_point_diag01.json") + " --alpha 0"), 2);
    EXPECT_EQ(status("check --input " + fixture("fixed_point_diag01.json")), 1);
    EXPECT_EQ(status("decompose --input " + fixture("regular_z3.json")), 0);
    EXPECT_EQ(status("bvp --bc D,X"), 1);
    EXPECT_EQ(status("frobnicate"), 1);
}
#endif
