#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ekdiff/csv.hpp"
#include "ekdiff/errors.hpp"
#include "ekdiff/quadrature.hpp"
#include "ekdiff/svg.hpp"
#include "ekdiff/verify.hpp"

using namespace ekdiff;

TEST_CASE("csv: shortest round-trip number formatting") {
    const double values[] = {0.1,     1.0 / 3.0, 1e-300, -2.5e17, 0.0,
                             1.0,     6.25e-2,   1e308,  -0.0,    4503599627370497.0};
    for (double v : values) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
        CHECK(s.find(',') == std::string::npos);
    }
    CHECK(format_double(0.1) == "0.1");  // shortest form, not 17 digits
}

TEST_CASE("csv: write and read round trip") {
    std::ostringstream os;
    write_csv(os, {"t", "value"}, {{0.5, 1.25}, {1.0, -3.5}}, {"run parameters: none"},
              {"footer note"});
    const std::string text = os.str();
    CHECK(text.find("\r") == std::string::npos);
    CHECK(text.back() == '\n');
    CHECK(text.rfind("# run parameters: none\n", 0) == 0);

    std::istringstream is(text);
    const CsvTable t = read_csv(is);
    CHECK(t.header == std::vector<std::string>{"t", "value"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == -3.5);
    REQUIRE(t.comments.size() == 2);
    CHECK(t.comments[1] == "footer note");
}

TEST_CASE("csv: malformed input is rejected") {
    std::istringstream missing_header("");
    CHECK_THROWS_AS(read_csv(missing_header), TableError);
    std::istringstream bad_number("a,b\n1.0,zork\n");
    CHECK_THROWS_AS(read_csv(bad_number), TableError);
    std::istringstream ragged("a,b\n1.0\n");
    CHECK_THROWS_AS(read_csv(ragged), TableError);
}

TEST_CASE("svg: deterministic self-contained plot") {
    SvgSeries s;
    s.x = {0.0, 1.0, 2.0};
    s.y = {0.5, -0.25, 1.0};
    s.label = "demo";
    std::ostringstream a, b;
    write_svg_plot(a, {s}, "title", "t", "y");
    write_svg_plot(b, {s}, "title", "t", "y");
    CHECK(a.str() == b.str());
    CHECK(a.str().find("<svg") != std::string::npos);
    CHECK(a.str().find("<polyline") != std::string::npos);
    CHECK(a.str().find("demo") != std::string::npos);

    SvgSeries bad = s;
    bad.y.pop_back();
    std::ostringstream c;
    CHECK_THROWS_AS(write_svg_plot(c, {bad}, "t", "x", "y"), DomainError);
}

TEST_CASE("quadrature: Gauss-Legendre and Gauss-Jacobi sanity") {
    const QuadRule& gl2 = gauss_legendre(2);
    CHECK(std::abs(gl2.nodes[1] - 0.5773502691896257) < 1e-15);
    CHECK(gl2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

    // weight integral and an exact low-degree moment for a singular weight
    const double a = -0.7, b = 0.0;
    const QuadRule& gj = gauss_jacobi(8, a, b);
    double mass = 0.0, mom2 = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        mass += gj.weights[i];
        mom2 += gj.weights[i] * gj.nodes[i] * gj.nodes[i];
    }
    // integral (1-x)^a dx = 2^(a+1)/(a+1); the rule is exact on degree <= 15
    CHECK(mass == doctest::Approx(std::pow(2.0, a + 1.0) / (a + 1.0)).epsilon(1e-13));
    // substituting u = (1-x)/2 gives
    //   integral (1-x)^a x^2 dx = 2^(a+1) (1/(a+1) - 4/(a+2) + 4/(a+3))
    const double want = std::pow(2.0, a + 1.0) *
                        (1.0 / (a + 1.0) - 4.0 / (a + 2.0) + 4.0 / (a + 3.0));
    CHECK(mom2 == doctest::Approx(want).epsilon(1e-12));

    CHECK_THROWS_AS(gauss_jacobi(8, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(gauss_jacobi(0, 0.0, 0.0), DomainError);
}

TEST_CASE("verify: quick suite passes and the fault hook proves it can fail") {
    const auto results = run_verification(false);
    REQUIRE(!results.empty());
    for (const auto& r : results) {
        INFO(r.name, ": ", r.detail);
        CHECK(r.passed);
    }
    CHECK(all_passed(results));

    // inject a wrong Gamma argument into one check's reference value
    setenv("EKDIFF_VERIFY_FAULT", "mwright_gaussian_case", 1);
    const auto faulted = run_verification(false);
    unsetenv("EKDIFF_VERIFY_FAULT");
    CHECK(!all_passed(faulted));
    bool hit = false;
    for (const auto& r : faulted)
        if (r.name == "mwright_gaussian_case") hit = !r.passed;
    CHECK(hit);
}
