#pragma once

#include <string>
#include <string_view>

#include "dtsfd/matrix.hpp"

namespace dtsfd {

enum class PenaltyKind { kLasso, kLogSum, kScad };

std::string_view to_string(PenaltyKind kind);
// Accepts "lasso", "logsum"/"log-sum", "scad".
PenaltyKind parse_penalty_kind(std::string_view name);

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::kLasso;
  double lambda = 0.1;
  double epsilon = 1e-3;  // log-sum only
  double scad_a = 3.7;    // SCAD only

  // Throws InvalidArgument unless lambda > 0, epsilon > 0, a > 2.
  void validate() const;
  PenaltySpec with_lambda(double l) const {
    PenaltySpec s = *this;
    s.lambda = l;
    return s;
  }
};

// h_lambda(u) for u >= 0.
double penalty_value(const PenaltySpec& spec, double u);

// Right derivative h'_lambda(u) for u >= 0; this is the LLA slope.
double penalty_derivative(const PenaltySpec& spec, double u);

// Per-group weights lambda_ij = h'_lambda(||group_ij||). Lasso ignores the
// norms and returns lambda everywhere.
RMatrix lla_weights(const PenaltySpec& spec, const RMatrix& group_norms);

}  // namespace dtsfd
