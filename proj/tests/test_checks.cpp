#include <doctest.h>

#include <string>

#include "nlobstacle/checks.hpp"
#include "nlobstacle/error.hpp"

using namespace nlobs;

TEST_CASE("scalar inequality suite")
{
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        CAPTURE(p);
        const CheckOutcome o = check_pineq(p, 42);
        CHECK(o.passed());
        CHECK(o.cases >= 10000);
    }
}

TEST_CASE("p = 2 inequality holds with equality")
{
    const CheckOutcome o = check_pineq(2.0, 42);
    bool reported = false;
    for (const std::string& line : o.lines) {
        if (line.find("equality") != std::string::npos) {
            reported = true;
        }
    }
    CHECK(reported);
}

TEST_CASE("coercivity and T-monotonicity")
{
    for (double s : {0.3, 0.7}) {
        for (double p : {2.0, 3.0, 1.5}) {
            CAPTURE(s);
            CAPTURE(p);
            CoercivitySetup setup;
            setup.grid = build_grid(-1.0, 1.0, 64);
            setup.s = s;
            setup.p = p;
            setup.pairs = 200;
            CHECK(check_coercivity(setup, 42).passed());
        }
    }
}

TEST_CASE("BBM check and its failure mode")
{
    const std::vector<double> ss{0.9, 0.99, 0.999};
    CHECK(check_bbm(CatalogFn::bump, 2.0, ss, 1e-6).passed());
    // a 1e-6 gap tolerance cannot be met at s = 0.999
    const CheckOutcome strict = check_bbm(CatalogFn::bump, 2.0, ss, 1e-6, 1e-6);
    CHECK_FALSE(strict.passed());
    CHECK_FALSE(strict.counterexample.empty());
}

TEST_CASE("problem-level checks")
{
    for (const char* id : {"CAT-B", "CAT-C", "CAT-D"}) {
        CAPTURE(id);
        ProblemCheckSetup setup;
        setup.problem = catalog_problem(id, build_grid(-1.0, 1.0, 128));
        setup.s = 0.5;
        setup.p = 2.0;
        CHECK(check_lewy_stampacchia(setup).passed());
        if (setup.problem.has_obstacle()) {
            CHECK_THROWS_AS(check_theta_sandwich(setup), ConfigError);
        } else {
            CHECK(check_theta_sandwich(setup).passed());
        }
    }
}
