#pragma once

#include <stdexcept>
#include <string>

namespace pesinlab {

enum class Err {
  degenerate_interval,
  ratio_infeasible,
  out_of_domain,
  not_c0,
  not_c1,
  not_expanding,
  params_infeasible,
  gap_overflow,
  word_too_long,
  depth_exceeded,
  domain_mismatch,
  unsupported_variant,
  conjugacy_violation,
  glue_ratio,
  gap_ratio,
  config,
  infeasible_experiment,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::degenerate_interval: return "DegenerateInterval";
    case Err::ratio_infeasible: return "RatioInfeasible";
    case Err::out_of_domain: return "OutOfDomain";
    case Err::not_c0: return "NotC0";
    case Err::not_c1: return "NotC1";
    case Err::not_expanding: return "NotExpanding";
    case Err::params_infeasible: return "ParamsInfeasible";
    case Err::gap_overflow: return "GapOverflow";
    case Err::word_too_long: return "WordTooLong";
    case Err::depth_exceeded: return "DepthExceeded";
    case Err::domain_mismatch: return "DomainMismatch";
    case Err::unsupported_variant: return "UnsupportedVariant";
    case Err::conjugacy_violation: return "ConjugacyViolation";
    case Err::glue_ratio: return "GlueRatioError";
    case Err::gap_ratio: return "GapRatioError";
    case Err::config: return "ConfigError";
    case Err::infeasible_experiment: return "InfeasibleExperiment";
  }
  return "LabError";
}

class LabError : public std::runtime_error {
 public:
  LabError(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw LabError(code, msg); }

}  // namespace pesinlab
