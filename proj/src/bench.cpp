#include "sptq/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sptq {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> toks;
  std::istringstream in{std::string(line)};
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

// keyword -> argument count (photon tag not included)
int arity_of(const std::string& kw) {
  if (kw == "source") return 1;
  if (kw == "hwp") return 1;
  if (kw == "pcnot" || kw == "mcnot") return 0;
  if (kw == "attenuator") return 2;
  if (kw == "block") return 1;
  if (kw == "analyzer1") return 2;
  if (kw == "analyzer2") return 1;
  return -1;
}

bool takes_photon_tag(const std::string& kw) { return kw != "source"; }

double parse_number(const std::string& tok, int line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw BenchError(line, tok, "expected a number, got '" + tok + "'");
  return v;
}

// Angles carry a mandatory unit suffix so half-wave-plate settings and
// analysis angles cannot be silently confused.
double parse_angle(const std::string& tok, int line) {
  std::string_view sv = tok;
  double scale;
  if (sv.size() > 3 && sv.substr(sv.size() - 3) == "deg") {
    scale = std::numbers::pi / 180.0;
    sv.remove_suffix(3);
  } else if (sv.size() > 3 && sv.substr(sv.size() - 3) == "rad") {
    scale = 1.0;
    sv.remove_suffix(3);
  } else {
    throw BenchError(line, tok, "angle '" + tok + "' needs a deg or rad suffix");
  }
  try {
    return parse_number(std::string(sv), line) * scale;
  } catch (const BenchError&) {
    // Name the token as written, not the suffix-stripped remainder.
    throw BenchError(line, tok, "expected a number with deg or rad suffix, got '" + tok + "'");
  }
}

int parse_bit(const std::string& tok, int line) {
  if (tok == "0" || tok == "1") return tok[0] - '0';
  throw BenchError(line, tok, "expected 0 or 1, got '" + tok + "'");
}

int parse_momentum(const std::string& tok, int line) {
  if (tok == "0" || tok == "1") return tok[0] - '0';
  if (tok.size() == 1) {
    try {
      return BasisConvention::momentum_bit(tok[0]);
    } catch (const std::invalid_argument&) {
    }
  }
  throw BenchError(line, tok, "expected a momentum path (T, B, 0 or 1), got '" + tok + "'");
}

// Validates argument shapes at parse time so compile only sees well-formed
// statements.
void check_statement(const BenchStatement& st) {
  if (st.keyword == "hwp" || st.keyword == "analyzer2") {
    parse_angle(st.args[0], st.line);
  } else if (st.keyword == "attenuator") {
    parse_number(st.args[0], st.line);
    parse_number(st.args[1], st.line);
  } else if (st.keyword == "analyzer1") {
    parse_angle(st.args[0], st.line);
    parse_bit(st.args[1], st.line);
  } else if (st.keyword == "block") {
    parse_momentum(st.args[0], st.line);
  }
}

}  // namespace

BenchProgram parse_bench(std::string_view text) {
  BenchProgram prog;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;

    BenchStatement st;
    st.line = line_no;
    st.keyword = lowercase(toks[0]);
    const int arity = arity_of(st.keyword);
    if (arity < 0) throw BenchError(line_no, toks[0], "unknown keyword '" + toks[0] + "'");

    std::size_t end = toks.size();
    const std::string last = end > 1 ? lowercase(toks[end - 1]) : "";
    if (takes_photon_tag(st.keyword) && (last == "signal" || last == "idler")) {
      st.photon = (last == "signal") ? Photon::Signal : Photon::Idler;
      --end;
    }
    for (std::size_t i = 1; i < end; ++i) st.args.push_back(toks[i]);
    if (static_cast<int>(st.args.size()) != arity)
      throw BenchError(line_no, toks[0],
                       "'" + st.keyword + "' takes " + std::to_string(arity) +
                           " argument(s), got " + std::to_string(st.args.size()));
    check_statement(st);
    prog.statements.push_back(std::move(st));
  }
  return prog;
}

std::string pretty_print(const BenchProgram& prog) {
  std::string out;
  for (const BenchStatement& st : prog.statements) {
    out += st.keyword;
    for (const std::string& a : st.args) {
      out += ' ';
      out += a;
    }
    if (st.photon) out += (*st.photon == Photon::Signal) ? " signal" : " idler";
    out += '\n';
  }
  return out;
}

Vector pair_source_state() {
  Vector v = Vector::Zero(16);
  const double a = 1.0 / std::numbers::sqrt2;
  v(0b0110) = a;
  v(0b0011) = a;
  return v;
}

Pipeline compile_bench(const BenchProgram& prog, const ImperfectionSet& imp) {
  imp.validate();
  Pipeline p;
  p.imperfections = imp;
  p.initial = ket_from_label("00");
  p.dimension = 4;

  bool sealed = false;  // an analyzer statement has been compiled
  for (std::size_t i = 0; i < prog.statements.size(); ++i) {
    const BenchStatement& st = prog.statements[i];
    if (st.keyword == "source") {
      if (i != 0)
        throw BenchError(st.line, st.keyword, "source must be the first statement");
      if (lowercase(st.args[0]) == "pair") {
        p.initial = pair_source_state();
        p.dimension = 16;
      } else {
        try {
          p.initial = ket_from_label(st.args[0]);
        } catch (const std::invalid_argument& e) {
          throw BenchError(st.line, st.args[0], e.what());
        }
        p.dimension = p.initial.size();
      }
      continue;
    }
    if (sealed)
      throw BenchError(st.line, st.keyword,
                       "statement after an analyzer; analyzers must be terminal");

    const Photon photon = st.photon.value_or(Photon::Signal);
    if (p.dimension == 4 && photon == Photon::Idler)
      throw BenchError(st.line, "idler", "idler tag on a single-photon bench");

    if (st.keyword == "hwp") {
      Element e = hwp(parse_angle(st.args[0], st.line));
      e.photon = photon;
      p.push(std::move(e));
    } else if (st.keyword == "pcnot") {
      for (Element& e : gate_elements(imp, photon)) p.push(std::move(e));
    } else if (st.keyword == "mcnot") {
      Element e = mcnot();
      e.photon = photon;
      p.push(std::move(e));
    } else if (st.keyword == "attenuator") {
      const double th = parse_number(st.args[0], st.line);
      const double tv = parse_number(st.args[1], st.line);
      if (th < 0.0 || th > 1.0 || tv < 0.0 || tv > 1.0)
        throw BenchError(st.line, st.args[th < 0.0 || th > 1.0 ? 0 : 1],
                         "amplitude transmission outside [0, 1]");
      Element e = attenuator(th, tv);
      e.photon = photon;
      p.push(std::move(e));
    } else if (st.keyword == "block") {
      Element e = beam_block(parse_momentum(st.args[0], st.line), photon);
      p.push(std::move(e));
    } else if (st.keyword == "analyzer1") {
      Element e = analyzer_I(parse_angle(st.args[0], st.line), parse_bit(st.args[1], st.line));
      e.photon = photon;
      p.push(std::move(e));
      sealed = true;
    } else if (st.keyword == "analyzer2") {
      Element e = analyzer_II(parse_angle(st.args[0], st.line));
      e.photon = photon;
      p.push(std::move(e));
      sealed = true;
    }
  }
  p.validate();
  return p;
}

}  // namespace sptq
