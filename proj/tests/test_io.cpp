#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "epmat/io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string temp_path(const std::string& stem) {
  const auto dir = std::filesystem::temp_directory_path();
  return (dir / ("epmat_io_" + stem)).string();
}

std::string write_text(const std::string& stem, const std::string& text) {
  const std::string path = temp_path(stem);
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Empty string when fn does not throw; the test then fails on find().
template <class F>
std::string parse_message(F&& fn) {
  try {
    fn();
  } catch (const epmat::ParseError& e) {
    return e.what();
  }
  return {};
}

bool same_bits(double a, double b) {
  return a == b && std::signbit(a) == std::signbit(b);
}

const double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("matrix files round-trip awkward values bit-exactly") {
  epmat::Matrix a(3, 3);
  a << 1.0 / 3.0, -0.0, 1e300,
      kPi, 1e-17, -2.5000000000000004,
      0.1, 6.02214076e23, -1e-300;
  const std::string path = temp_path("roundtrip.mat");
  epmat::write_matrix_file(path, epmat::NamedMatrix{"awkward", a});
  const epmat::NamedMatrix doc = epmat::read_matrix_file(path);
  CHECK(doc.name == "awkward");
  REQUIRE(doc.value.rows() == 3);
  REQUIRE(doc.value.cols() == 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(same_bits(doc.value(i, j), a(i, j)));
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("vector files round-trip bit-exactly") {
  epmat::Vector v(5);
  v << -0.0, 1.0 / 3.0, 1e-17, 1e300, kPi;
  const std::string path = temp_path("roundtrip.vec");
  epmat::write_vector_file(path, epmat::NamedVector{"awkward_v", v});
  const epmat::NamedVector doc = epmat::read_vector_file(path);
  CHECK(doc.name == "awkward_v");
  REQUIRE(doc.value.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(same_bits(doc.value(i), v(i)));
  std::filesystem::remove(path);
}

TEST_CASE("vector entries may be split across lines or share one") {
  const std::string split =
      write_text("split.vec", "name v\nn 4\n1 2\n3\n4\n");
  const epmat::NamedVector a = epmat::read_vector_file(split);
  REQUIRE(a.value.size() == 4);
  CHECK(a.value(0) == 1.0);
  CHECK(a.value(3) == 4.0);

  const std::string oneline = write_text("oneline.vec", "name v\nn 3\n5 6 7\n");
  const epmat::NamedVector b = epmat::read_vector_file(oneline);
  REQUIRE(b.value.size() == 3);
  CHECK(b.value(2) == 7.0);
  std::filesystem::remove(split);
  std::filesystem::remove(oneline);
}

TEST_CASE("shipped matrix fixture parses") {
  const epmat::NamedMatrix doc =
      epmat::read_matrix_file(std::string(EPMAT_FIXTURE_DIR) +
                              "/identity3.mat");
  CHECK(doc.name == "identity3");
  REQUIRE(doc.value.rows() == 3);
  CHECK(doc.value == epmat::Matrix::Identity(3, 3));
}

TEST_CASE("shipped scenario fixture parses fully") {
  const epmat::Scenario sc =
      epmat::read_scenario_file(std::string(EPMAT_FIXTURE_DIR) +
                                "/path3.scn");
  CHECK(sc.name == "path3");
  CHECK(sc.graph.n == 3);
  REQUIRE(sc.graph.arcs.size() == 4);
  CHECK(sc.graph.arcs[0].from == 1);
  CHECK(sc.graph.arcs[0].to == 2);
  CHECK(sc.graph.arcs[0].weight == 1.0);
  REQUIRE(sc.x0s.size() == 2);
  CHECK(sc.x0s[0](0) == 1.0);
  CHECK(sc.x0s[0](2) == -1.0);
  CHECK(sc.x0s[1](1) == -0.25);
  CHECK(sc.grid.t_max == 20.0);
  CHECK(sc.grid.points == 200);
  CHECK(sc.grid.spacing == epmat::GridSpacing::linear);
}

TEST_CASE("parse errors carry the file position") {
  const std::string bad_tok =
      write_text("badtok.mat", "name m\nn 2\n1 2\nx 4\n");
  std::string msg =
      parse_message([&] { epmat::read_matrix_file(bad_tok); });
  CHECK(msg.find(":4: ") != std::string::npos);
  CHECK(msg.find("not a number") != std::string::npos);

  const std::string wide = write_text("wide.mat", "name m\nn 2\n1 2 3\n");
  msg = parse_message([&] { epmat::read_matrix_file(wide); });
  CHECK(msg.find(":3: ") != std::string::npos);
  CHECK(msg.find("expected 2 entries") != std::string::npos);

  const std::string trailing =
      write_text("trailing.mat", "name m\nn 1\n5\n7\n");
  msg = parse_message([&] { epmat::read_matrix_file(trailing); });
  CHECK(msg.find(":4: ") != std::string::npos);
  CHECK(msg.find("unexpected trailing content") != std::string::npos);

  // comment and blank lines still count toward the reported position
  const std::string offset =
      write_text("offset.mat", "# header\nname m\n\nn 1\nbad\n");
  msg = parse_message([&] { epmat::read_matrix_file(offset); });
  CHECK(msg.find(":5: ") != std::string::npos);

  for (const std::string& p : {bad_tok, wide, trailing, offset}) {
    std::filesystem::remove(p);
  }
}

TEST_CASE("vector arity errors name the expected count") {
  const std::string over = write_text("over.vec", "name v\nn 2\n1 2 3\n");
  std::string msg = parse_message([&] { epmat::read_vector_file(over); });
  CHECK(msg.find(":3: ") != std::string::npos);
  CHECK(msg.find("more than 2 entries") != std::string::npos);

  const std::string under = write_text("under.vec", "name v\nn 3\n1 2\n");
  msg = parse_message([&] { epmat::read_vector_file(under); });
  CHECK(msg.find("expected 3 entries") != std::string::npos);

  const std::string empty = write_text("empty.vec", "");
  msg = parse_message([&] { epmat::read_vector_file(empty); });
  CHECK(msg.find("missing name line") != std::string::npos);

  CHECK_THROWS_AS(epmat::read_vector_file(temp_path("no_such_file.vec")),
                  epmat::ParseError);

  for (const std::string& p : {over, under, empty}) {
    std::filesystem::remove(p);
  }
}

TEST_CASE("scenario errors point at the offending directive") {
  const std::string unknown = write_text(
      "unknown.scn", "name s\nn 2\narc 1 2 1\nfoo\ngrid 1 10 linear\n");
  std::string msg =
      parse_message([&] { epmat::read_scenario_file(unknown); });
  CHECK(msg.find(":4: ") != std::string::npos);
  CHECK(msg.find("unknown directive: foo") != std::string::npos);

  const std::string nogrid =
      write_text("nogrid.scn", "name s\nn 2\narc 1 2 1\n");
  msg = parse_message([&] { epmat::read_scenario_file(nogrid); });
  CHECK(msg.find("missing grid line") != std::string::npos);

  const std::string spacing = write_text(
      "spacing.scn", "name s\nn 2\narc 1 2 1\ngrid 1 10 cubic\n");
  msg = parse_message([&] { epmat::read_scenario_file(spacing); });
  CHECK(msg.find("spacing must be linear, log, or both") !=
        std::string::npos);

  const std::string x0arity = write_text(
      "x0arity.scn", "name s\nn 2\nx0 1\ngrid 1 10 linear\n");
  msg = parse_message([&] { epmat::read_scenario_file(x0arity); });
  CHECK(msg.find(":3: ") != std::string::npos);
  CHECK(msg.find("expected 2 entries after x0") != std::string::npos);

  // graph validation failures surface as parse errors too
  const std::string selfloop = write_text(
      "selfloop.scn", "name s\nn 2\narc 1 1 1\ngrid 1 10 linear\n");
  CHECK_THROWS_AS(epmat::read_scenario_file(selfloop), epmat::ParseError);

  for (const std::string& p :
       {unknown, nogrid, spacing, x0arity, selfloop}) {
    std::filesystem::remove(p);
  }
}

TEST_CASE("time grids honor spacing and bounds") {
  epmat::GridSpec lin{5.0, 11, epmat::GridSpacing::linear};
  const auto g = epmat::make_time_grid(lin);
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 5.0);
  for (int i = 0; i < 11; ++i) CHECK(g[i] == doctest::Approx(0.5 * i));

  epmat::GridSpec single{3.0, 1, epmat::GridSpacing::linear};
  const auto g1 = epmat::make_time_grid(single);
  REQUIRE(g1.size() == 1);
  CHECK(g1[0] == 3.0);

  epmat::GridSpec lg{10.0, 8, epmat::GridSpacing::log};
  const auto gl = epmat::make_time_grid(lg);
  REQUIRE(gl.size() == 8);
  CHECK(gl.front() == doctest::Approx(1e-3));
  CHECK(gl.back() == doctest::Approx(10.0));
  for (std::size_t i = 1; i < gl.size(); ++i) CHECK(gl[i] > gl[i - 1]);

  // log floor at 1e-3 collapses very short horizons to one sample
  epmat::GridSpec shallow{5e-4, 50, epmat::GridSpacing::log};
  const auto gs = epmat::make_time_grid(shallow);
  REQUIRE(gs.size() == 1);
  CHECK(gs[0] == 5e-4);

  epmat::GridSpec both{10.0, 50, epmat::GridSpacing::both};
  const auto gb = epmat::make_time_grid(both);
  CHECK(gb.size() >= 50);
  CHECK(gb.size() <= 100);
  CHECK(gb.front() == 0.0);
  CHECK(gb.back() == doctest::Approx(10.0));
  for (std::size_t i = 1; i < gb.size(); ++i) CHECK(gb[i] > gb[i - 1]);

  CHECK_THROWS_AS(
      epmat::make_time_grid({0.0, 10, epmat::GridSpacing::linear}),
      epmat::DomainError);
  CHECK_THROWS_AS(
      epmat::make_time_grid({1.0, 0, epmat::GridSpacing::linear}),
      epmat::DomainError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(
      epmat::make_time_grid({inf, 10, epmat::GridSpacing::linear}),
      epmat::DomainError);
}

TEST_CASE("grid spacing names round-trip") {
  using epmat::GridSpacing;
  CHECK(std::string(epmat::to_string(GridSpacing::linear)) == "linear");
  CHECK(std::string(epmat::to_string(GridSpacing::log)) == "log");
  CHECK(std::string(epmat::to_string(GridSpacing::both)) == "both");
  CHECK(epmat::spacing_from_string("linear") == GridSpacing::linear);
  CHECK(epmat::spacing_from_string("log") == GridSpacing::log);
  CHECK(epmat::spacing_from_string("both") == GridSpacing::both);
  CHECK_THROWS_AS(epmat::spacing_from_string("cubic"), epmat::ParseError);
}

TEST_CASE("doubles print at full precision and reparse exactly") {
  const std::vector<double> values = {
      1.0 / 3.0,
      -0.0,
      1e-17,
      1e300,
      kPi,
      0.1,
      12345.678901234567,
      4.9406564584124654e-324,
      -1.7976931348623157e308,
  };
  for (const double v : values) {
    const std::string s = epmat::format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(same_bits(back, v));
  }
  CHECK(epmat::format_double(-0.0)[0] == '-');
}

TEST_CASE("csv reports have a header and full-precision records") {
  epmat::Matrix r(2, 2);
  r << 0.5, 1.0 / 3.0, -2.0, 1e300;
  const std::string path = temp_path("report.csv");
  epmat::write_csv(path, {"alpha", "beta"}, r);
  const std::string text = slurp(path);
  CHECK(text ==
        "alpha,beta\n"
        "0.5,0.33333333333333331\n"
        "-2,1.0000000000000001e+300\n");
  CHECK_THROWS_AS(epmat::write_csv(path, {"a", "b", "c"}, r),
                  epmat::DomainError);
  std::filesystem::remove(path);
}

TEST_CASE("file digests are stable and content-sensitive") {
  const std::string a = write_text("digest_a.txt", "hello\n");
  const std::string b = write_text("digest_b.txt", "hello!\n");
  const std::string da = epmat::file_digest(a);
  CHECK(da.size() == 16);
  CHECK(da.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(da == epmat::file_digest(a));
  CHECK(da != epmat::file_digest(b));

  const std::string empty = write_text("digest_empty.txt", "");
  CHECK(epmat::file_digest(empty) == "cbf29ce484222325");

  CHECK(epmat::fnv1a64("", 0) == 14695981039346656037ULL);
  CHECK(epmat::fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);

  for (const std::string& p : {a, b, empty}) std::filesystem::remove(p);
}
