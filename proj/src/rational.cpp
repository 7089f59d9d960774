#include "ranjac/rational.hpp"

#include "ranjac/error.hpp"

namespace ranjac {

std::string rat_str(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rat parse_rat(const std::string& s) {
  if (s.empty()) fail(Err::ParseError, "empty rational");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) fail(Err::ParseError, "bad rational '" + s + "'");
  bool slash_seen = false;
  for (std::size_t k = i; k < s.size(); ++k) {
    if (s[k] == '/') {
      if (slash_seen || k == i || k + 1 == s.size())
        fail(Err::ParseError, "bad rational '" + s + "'");
      slash_seen = true;
      continue;
    }
    if (s[k] < '0' || s[k] > '9')
      fail(Err::ParseError, "bad rational '" + s + "'");
  }
  Rat q;
  if (q.set_str(s, 10) != 0) fail(Err::ParseError, "bad rational '" + s + "'");
  if (q.get_den() == 0) fail(Err::ParseError, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

const char* err_name(Err e) {
  switch (e) {
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::SquareNonzero: return "SquareNonzero";
    case Err::NotChainMap: return "NotChainMap";
    case Err::FiltrationNotRespected: return "FiltrationNotRespected";
    case Err::WindowExceeded: return "WindowExceeded";
    case Err::SkewFail: return "SkewFail";
    case Err::JacobiFail: return "JacobiFail";
    case Err::LeibnizFail: return "LeibnizFail";
    case Err::WrongDegree: return "WrongDegree";
    case Err::NotMaurerCartan: return "NotMaurerCartan";
    case Err::NotAnIdeal: return "NotAnIdeal";
    case Err::NotLieMorphism: return "NotLieMorphism";
    case Err::NotCoalgebraMorphism: return "NotCoalgebraMorphism";
    case Err::CutoffExceeded: return "CutoffExceeded";
    case Err::NotAModule: return "NotAModule";
    case Err::CocycleFail: return "CocycleFail";
    case Err::FlatnessFail: return "FlatnessFail";
    case Err::HypothesisFail: return "HypothesisFail";
    case Err::FactorFail: return "FactorFail";
    case Err::AxiomFail: return "AxiomFail";
    case Err::TrivializationFail: return "TrivializationFail";
    case Err::NonScalarAction: return "NonScalarAction";
    case Err::ParseError: return "ParseError";
    case Err::BadInput: return "BadInput";
  }
  return "UnknownError";
}

} // namespace ranjac
