#include "dtsfd/penalty.hpp"

#include <cmath>
#include <string>

#include "dtsfd/error.hpp"

namespace dtsfd {

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kLasso:
      return "lasso";
    case PenaltyKind::kLogSum:
      return "logsum";
    case PenaltyKind::kScad:
      return "scad";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  if (name == "lasso") return PenaltyKind::kLasso;
  if (name == "logsum" || name == "log-sum") return PenaltyKind::kLogSum;
  if (name == "scad") return PenaltyKind::kScad;
  throw InvalidArgument("unknown penalty '" + std::string(name) +
                        "' (expected lasso, logsum or scad)");
}

void PenaltySpec::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("penalty: lambda must be positive and finite");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("penalty: epsilon must be positive");
  }
  if (!(scad_a > 2.0)) {
    throw InvalidArgument("penalty: SCAD parameter a must exceed 2");
  }
}

double penalty_value(const PenaltySpec& spec, double u) {
  if (u < 0.0) throw InvalidArgument("penalty_value: u must be >= 0");
  const double l = spec.lambda;
  switch (spec.kind) {
    case PenaltyKind::kLasso:
      return l * u;
    case PenaltyKind::kLogSum:
      return l * spec.epsilon * std::log1p(u / spec.epsilon);
    case PenaltyKind::kScad: {
      const double a = spec.scad_a;
      if (u <= l) return l * u;
      if (u < a * l) return (2.0 * a * l * u - u * u - l * l) / (2.0 * (a - 1.0));
      return l * l * (a + 1.0) / 2.0;
    }
  }
  return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double u) {
  if (u < 0.0) throw InvalidArgument("penalty_derivative: u must be >= 0");
  const double l = spec.lambda;
  switch (spec.kind) {
    case PenaltyKind::kLasso:
      return l;
    case PenaltyKind::kLogSum:
      return l * spec.epsilon / (u + spec.epsilon);
    case PenaltyKind::kScad: {
      // Branch conditions exactly as in the LLA weight rule: <= on the
      // inner boundaries.
      const double a = spec.scad_a;
      if (u <= l) return l;
      if (u <= a * l) return (a * l - u) / (a - 1.0);
      return 0.0;
    }
  }
  return 0.0;
}

RMatrix lla_weights(const PenaltySpec& spec, const RMatrix& group_norms) {
  if ((group_norms.array() < 0.0).any()) {
    throw InvalidArgument("lla_weights: group norms must be non-negative");
  }
  if (spec.kind == PenaltyKind::kLasso) {
    return RMatrix::Constant(group_norms.rows(), group_norms.cols(),
                             spec.lambda);
  }
  return group_norms.unaryExpr(
      [&spec](double u) { return penalty_derivative(spec, u); });
}

}  // namespace dtsfd
