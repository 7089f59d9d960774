#ifndef RANJAC_ERROR_HPP
#define RANJAC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ranjac {

enum class Err {
  ShapeMismatch,
  SquareNonzero,
  NotChainMap,
  FiltrationNotRespected,
  WindowExceeded,
  SkewFail,
  JacobiFail,
  LeibnizFail,
  WrongDegree,
  NotMaurerCartan,
  NotAnIdeal,
  NotLieMorphism,
  NotCoalgebraMorphism,
  CutoffExceeded,
  NotAModule,
  CocycleFail,
  FlatnessFail,
  HypothesisFail,
  FactorFail,
  AxiomFail,
  TrivializationFail,
  NonScalarAction,
  ParseError,
  BadInput,
};

const char* err_name(Err e);

// Validation failure with a minimal witness (offending degree, basis triple,
// word, ...) carried in the message.
class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& witness)
      : std::runtime_error(std::string(err_name(code)) + ": " + witness),
        code_(code) {}
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& witness) {
  throw Error(code, witness);
}

} // namespace ranjac

#endif
