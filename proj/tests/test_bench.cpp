// Bench-text parser and compiler: grammar acceptance, error reporting with
// line and token, round-trip stability, and equivalence of compiled pipelines
// with directly composed matrices.

#include "sptq/bench.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sptq;

namespace {

double dist(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

bool same_statements(const BenchProgram& a, const BenchProgram& b) {
  if (a.statements.size() != b.statements.size()) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const BenchStatement& x = a.statements[i];
    const BenchStatement& y = b.statements[i];
    if (x.keyword != y.keyword || x.args != y.args || x.photon != y.photon) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parsing a full bench listing") {
  const char* text =
      "# pair source, one rotated arm, the gate, then analysis\n"
      "source pair\n"
      "hwp 22.5deg signal\n"
      "pcnot signal\n"
      "analyzer1 45deg 0 signal\n";
  const BenchProgram prog = parse_bench(text);
  REQUIRE(prog.statements.size() == 4);

  CHECK(prog.statements[0].keyword == "source");
  CHECK(prog.statements[0].args == std::vector<std::string>{"pair"});
  CHECK(prog.statements[0].line == 2);

  CHECK(prog.statements[1].keyword == "hwp");
  CHECK(prog.statements[1].photon == Photon::Signal);
  CHECK(prog.statements[1].line == 3);

  CHECK(prog.statements[3].keyword == "analyzer1");
  CHECK(prog.statements[3].args == std::vector<std::string>{"45deg", "0"});
  CHECK(prog.statements[3].line == 5);
}

TEST_CASE("angles accept deg and rad, nothing else") {
  CHECK_NOTHROW(parse_bench("hwp 22.5deg"));
  CHECK_NOTHROW(parse_bench("hwp 0.3927rad"));
  CHECK_NOTHROW(parse_bench("hwp -45deg"));

  try {
    parse_bench("hwp 22.5");
    FAIL("missing unit accepted");
  } catch (const BenchError& e) {
    CHECK(e.line() == 1);
    CHECK(e.token() == "22.5");
  }

  try {
    parse_bench("source 00\nhwp abcdeg");
    FAIL("non-numeric angle accepted");
  } catch (const BenchError& e) {
    CHECK(e.line() == 2);
    CHECK(e.token() == "abcdeg");
  }
}

TEST_CASE("parse errors carry line and token") {
  try {
    parse_bench("source 00\npolarizer 45deg\n");
    FAIL("unknown keyword accepted");
  } catch (const BenchError& e) {
    CHECK(e.line() == 2);
    CHECK(e.token() == "polarizer");
  }

  CHECK_THROWS_AS(parse_bench("hwp"), BenchError);              // missing argument
  CHECK_THROWS_AS(parse_bench("hwp 45deg 30deg"), BenchError);  // extra argument
  CHECK_THROWS_AS(parse_bench("attenuator 0.9"), BenchError);
  CHECK_THROWS_AS(parse_bench("pcnot 45deg"), BenchError);
  CHECK_THROWS_AS(parse_bench("block 2"), BenchError);
  CHECK_THROWS_AS(parse_bench("analyzer1 45deg 3"), BenchError);
}

TEST_CASE("pretty print round trip") {
  const char* text =
      "source pair\n"
      "  hwp 22.5deg   signal\n"
      "# comment\n"
      "PCNOT idler\n"
      "attenuator 0.95 1.0 idler\n"
      "analyzer2 45deg signal\n";
  const BenchProgram once = parse_bench(text);
  const BenchProgram twice = parse_bench(pretty_print(once));
  CHECK(same_statements(once, twice));
}

TEST_CASE("pair source amplitudes") {
  const Vector theta = pair_source_state();
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(theta(0b0110) - Complex(inv_sqrt2, 0)) < 1e-15);
  CHECK(std::abs(theta(0b0011) - Complex(inv_sqrt2, 0)) < 1e-15);
  CHECK(std::abs(theta.norm() - 1.0) < 1e-15);
}

TEST_CASE("compilation: source handling and dimensions") {
  const ImperfectionSet ideal;

  const Pipeline pair = compile_bench(parse_bench("source pair\npcnot signal"), ideal);
  CHECK(pair.dimension == 16);
  CHECK(dist(Matrix(pair.initial * pair.initial.adjoint()),
             Matrix(pair_source_state() * pair_source_state().adjoint())) < 1e-15);

  const Pipeline basis = compile_bench(parse_bench("source 10\nhwp 45deg"), ideal);
  CHECK(basis.dimension == 4);
  CHECK(std::abs(basis.initial(2) - Complex(1, 0)) < 1e-15);

  // No source line: the single-photon ground label.
  const Pipeline fallback = compile_bench(parse_bench("hwp 45deg"), ideal);
  CHECK(fallback.dimension == 4);
  CHECK(std::abs(fallback.initial(0) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("compilation errors") {
  const ImperfectionSet ideal;

  try {
    compile_bench(parse_bench("source 00\nhwp 45deg idler"), ideal);
    FAIL("idler on a single-photon bench accepted");
  } catch (const BenchError& e) {
    CHECK(e.line() == 2);
  }

  // source must open the program, and only once.
  CHECK_THROWS_AS(compile_bench(parse_bench("hwp 45deg\nsource pair"), ideal), BenchError);
  CHECK_THROWS_AS(compile_bench(parse_bench("source pair\nsource 00"), ideal), BenchError);

  try {
    compile_bench(parse_bench("source 00\nanalyzer1 0deg 0\nhwp 3deg"), ideal);
    FAIL("statement after a terminal analyzer accepted");
  } catch (const BenchError& e) {
    CHECK(e.line() == 3);
  }

  CHECK_THROWS_AS(compile_bench(parse_bench("attenuator 1.2 1.0"), ideal), BenchError);
  CHECK_THROWS_AS(compile_bench(parse_bench("source 012"), ideal), BenchError);
}

TEST_CASE("compiled pipeline equals the matrix product") {
  const ImperfectionSet ideal;
  const char* text =
      "source 00\n"
      "hwp 10deg\n"
      "pcnot\n"
      "mcnot\n"
      "hwp 77deg\n";
  const Pipeline p = compile_bench(parse_bench(text), ideal);
  const Matrix got = composed_unitary(p);

  const double d1 = 10.0 * std::numbers::pi / 180.0;
  const double d2 = 77.0 * std::numbers::pi / 180.0;
  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix expect = kron(hwp(d2).ops[0], i2) * mcnot().ops[0] * pcnot().ops[0] *
                        kron(hwp(d1).ops[0], i2);
  CHECK(dist(got, expect) < 1e-14);
}

TEST_CASE("gate statement expands its imperfections") {
  ImperfectionSet imp;
  imp.pbs_transmission_h = std::sqrt(0.9);
  imp.plate_transmission_v = 0.9;
  const Pipeline p = compile_bench(parse_bench("source 00\npcnot"), imp);
  // gate + two loss elements; the compiled pipeline is no longer unitary
  CHECK(p.elements.size() == 3);
  CHECK_THROWS_AS(composed_unitary(p), std::invalid_argument);
}

TEST_CASE("beam block statement accepts path letters") {
  const ImperfectionSet ideal;
  const Pipeline p = compile_bench(parse_bench("source pair\nblock T idler"), ideal);
  REQUIRE(p.elements.size() == 1);
  CHECK(p.elements[0].photon == Photon::Idler);
  const PipelineOutcome out = run_pipeline(p);
  // Blocking the idler top path keeps only the |0011> component.
  CHECK(out.probability == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(out.state.has_value());
  CHECK(out.state->matrix()(3, 3).real() == doctest::Approx(1.0).epsilon(1e-12));
}
