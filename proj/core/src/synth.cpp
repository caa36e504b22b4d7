#include "dtsfd/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dtsfd/error.hpp"
#include "dtsfd/solver.hpp"

namespace dtsfd {

namespace {

constexpr int kBurnIn = 100;
constexpr double kStabilityRadius = 0.95;

struct CoefficientLaw {
  double nonzero_fraction;
  double low;  // magnitude range; low == 0 means a symmetric interval
  double high;
};

constexpr CoefficientLaw kVarLaw{0.20, 0.3, 0.8};
constexpr CoefficientLaw kMaLaw{0.25, 0.2, 0.4};
constexpr CoefficientLaw kMaReplacementLaw{0.25, 0.0, 0.2};

double signed_uniform(Rng& rng, double low, double high) {
  if (low == 0.0) {
    return std::uniform_real_distribution<double>(-high, high)(rng);
  }
  const double mag = std::uniform_real_distribution<double>(low, high)(rng);
  return std::bernoulli_distribution(0.5)(rng) ? mag : -mag;
}

std::array<RMatrix, 3> draw_block(int b, const CoefficientLaw& law, Rng& rng) {
  std::array<RMatrix, 3> out;
  std::bernoulli_distribution pick(law.nonzero_fraction);
  for (auto& a : out) {
    a = RMatrix::Zero(b, b);
    for (int j = 0; j < b; ++j) {
      for (int i = 0; i < b; ++i) {
        if (pick(rng)) a(i, j) = signed_uniform(rng, law.low, law.high);
      }
    }
  }
  return out;
}

std::array<RMatrix, 3> scaled(const std::array<RMatrix, 3>& a, double c) {
  return {a[0] * c, a[1] * c, a[2] * c};
}

// Largest c in (0, 1] (to 1e-3) with companion radius of c*A <= 0.95.
double stability_scale(const std::vector<std::array<RMatrix, 3>>& blocks) {
  auto radius = [&](double c) {
    double r = 0.0;
    for (const auto& b : blocks) {
      r = std::max(r, companion_spectral_radius(scaled(b, c)));
    }
    return r;
  };
  if (radius(1.0) <= kStabilityRadius) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    if (radius(mid) <= kStabilityRadius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void place_block(std::array<RMatrix, 3>& coeffs,
                 const std::array<RMatrix, 3>& block, int q, int b) {
  for (int i = 0; i < 3; ++i) coeffs[i].block(q * b, q * b, b, b) = block[i];
}

CMatrix lag_polynomial(const SynthModel& m, double f, double lead,
                       double sign) {
  const Complex z = std::exp(Complex(0.0, -2.0 * std::numbers::pi * f));
  CMatrix h = CMatrix::Identity(m.p, m.p) * lead;
  Complex zi = 1.0;
  for (int i = 0; i < 3; ++i) {
    zi *= z;
    const double lag_scale = m.kind == ModelKind::kMa3 ? 1.0 / (i + 1) : 1.0;
    h += sign * lag_scale * zi * m.coefficients[i].cast<Complex>();
  }
  return h;
}

// VAR: I - sum A_i z^i ; MA: 0.5 I + sum (B_i / i) z^i
CMatrix transfer_denominator_or_numerator(const SynthModel& m, double f) {
  if (m.kind == ModelKind::kVar3) return lag_polynomial(m, f, 1.0, -1.0);
  return lag_polynomial(m, f, 0.5, 1.0);
}

void validate_model(const SynthModel& m) {
  if (m.p < 1 || m.omega.rows() != m.p || m.omega.cols() != m.p) {
    throw InvalidArgument("synthetic model: inconsistent dimensions");
  }
  for (const auto& a : m.coefficients) {
    if (a.rows() != m.p || a.cols() != m.p) {
      throw InvalidArgument("synthetic model: coefficient matrix must be p x p");
    }
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kVar3 ? "ar" : "ma";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "ar" || name == "var3" || name == "var") return ModelKind::kVar3;
  if (name == "ma" || name == "ma3" || name == "vma") return ModelKind::kMa3;
  throw InvalidArgument("unknown model kind '" + std::string(name) +
                        "' (expected ar or ma)");
}

RMatrix gen_er_precision(int p, double p_er, Rng& rng,
                         const ErPrecisionOptions& opts) {
  if (p < 1) throw InvalidArgument("gen_er_precision: p must be >= 1");
  if (!(p_er >= 0.0 && p_er <= 1.0)) {
    throw InvalidArgument("gen_er_precision: p_er must lie in [0, 1]");
  }
  std::bernoulli_distribution connect(p_er);
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    RMatrix omega = RMatrix::Identity(p, p) * opts.diagonal;
    for (int j = 0; j < p; ++j) {
      for (int i = j + 1; i < p; ++i) {
        if (connect(rng)) {
          const double v =
              signed_uniform(rng, opts.magnitude_low, opts.magnitude_high);
          omega(i, j) = v;
          omega(j, i) = v;
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(omega, Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success && es.eigenvalues()(0) > opts.min_eigenvalue) {
      return omega;
    }
  }
  throw NumericalError("gen_er_precision: no positive definite draw in " +
                       std::to_string(opts.max_attempts) + " attempts");
}

int default_block_size(int p) {
  switch (p) {
    case 60:
      return 10;
    case 120:
      return 15;
    case 240:
      return 30;
    default:
      throw InvalidArgument("no default block layout for p = " +
                            std::to_string(p) + "; pass a block size");
  }
}

double companion_spectral_radius(const std::array<RMatrix, 3>& a) {
  const Eigen::Index p = a[0].rows();
  RMatrix companion = RMatrix::Zero(3 * p, 3 * p);
  for (int i = 0; i < 3; ++i) companion.block(0, i * p, p, p) = a[i];
  companion.block(p, 0, 2 * p, 2 * p) = RMatrix::Identity(2 * p, 2 * p);
  Eigen::EigenSolver<RMatrix> es(companion, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("companion_spectral_radius: eigen routine failed");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ModelPair gen_model_pair(ModelKind kind, int p, Rng& rng, int block_size) {
  const int b = block_size > 0 ? block_size : default_block_size(p);
  if (p % b != 0) {
    throw InvalidArgument("gen_model_pair: p = " + std::to_string(p) +
                          " is not a multiple of the block size " +
                          std::to_string(b));
  }
  const int nblocks = p / b;
  const CoefficientLaw& law = kind == ModelKind::kVar3 ? kVarLaw : kMaLaw;

  ModelPair pair;
  SynthModel& x = pair.x;
  x.kind = kind;
  x.p = p;
  x.block_size = b;
  x.omega = gen_er_precision(p, 0.001, rng);

  std::vector<std::array<RMatrix, 3>> blocks;
  blocks.reserve(nblocks);
  for (int q = 0; q < nblocks; ++q) blocks.push_back(draw_block(b, law, rng));
  if (kind == ModelKind::kVar3) {
    const double c = stability_scale(blocks);
    for (auto& blk : blocks) blk = scaled(blk, c);
  }
  for (auto& a : x.coefficients) a = RMatrix::Zero(p, p);
  for (int q = 0; q < nblocks; ++q) place_block(x.coefficients, blocks[q], q, b);

  pair.y = x;
  const int q = std::uniform_int_distribution<int>(0, nblocks - 1)(rng);
  pair.replaced_block = q;
  std::array<RMatrix, 3> fresh;
  if (kind == ModelKind::kVar3) {
    fresh = draw_block(b, kVarLaw, rng);
    // Only the new cluster is rescaled; the copied clusters are already stable.
    fresh = scaled(fresh, stability_scale({fresh}));
  } else {
    fresh = draw_block(b, kMaReplacementLaw, rng);
  }
  place_block(pair.y.coefficients, fresh, q, b);
  return pair;
}

TimeSeries simulate(const SynthModel& model, std::int64_t n, Rng& rng) {
  validate_model(model);
  if (n < 1) throw InvalidArgument("simulate: n must be >= 1");
  const int p = model.p;
  const RMatrix cov = model.omega.inverse();
  Eigen::LLT<RMatrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("simulate: innovation covariance is not positive definite");
  }
  const RMatrix chol = llt.matrixL();

  const std::int64_t total = n + kBurnIn;
  std::normal_distribution<double> normal(0.0, 1.0);
  // Ring of the last three innovations / outputs.
  std::array<RVector, 3> past;
  for (auto& v : past) v = RVector::Zero(p);
  RVector z(p);
  RVector w(p);
  RVector x(p);
  TimeSeries out;
  out.values.resize(p, n);
  for (std::int64_t t = 0; t < total; ++t) {
    for (int i = 0; i < p; ++i) z(i) = normal(rng);
    w.noalias() = chol * z;
    if (model.kind == ModelKind::kVar3) {
      x = w;
      for (int i = 0; i < 3; ++i) x.noalias() += model.coefficients[i] * past[i];
      past[2].swap(past[1]);
      past[1].swap(past[0]);
      past[0] = x;
    } else {
      x = 0.5 * w;
      for (int i = 0; i < 3; ++i) {
        x.noalias() += (model.coefficients[i] / (i + 1.0)) * past[i];
      }
      past[2].swap(past[1]);
      past[1].swap(past[0]);
      past[0] = w;
    }
    if (t >= kBurnIn) out.values.col(t - kBurnIn) = x;
  }
  return out;
}

HermitianMatrix true_psd(const SynthModel& model, double f) {
  validate_model(model);
  const CMatrix poly = transfer_denominator_or_numerator(model, f);
  const CMatrix cov = model.omega.inverse().cast<Complex>();
  if (model.kind == ModelKind::kMa3) {
    return HermitianMatrix(hermitian_part(poly * cov * poly.adjoint()));
  }
  Eigen::FullPivLU<CMatrix> lu(poly);
  if (!lu.isInvertible()) {
    throw NumericalError("true_psd: I - sum A_i z^i is singular at f = " +
                         std::to_string(f));
  }
  const CMatrix h = lu.inverse();
  return HermitianMatrix(hermitian_part(h * cov * h.adjoint()));
}

CMatrix inverse_psd(const SynthModel& model, double f) {
  validate_model(model);
  const CMatrix poly = transfer_denominator_or_numerator(model, f);
  const CMatrix omega = model.omega.cast<Complex>();
  if (model.kind == ModelKind::kVar3) {
    return hermitian_part(poly.adjoint() * omega * poly);
  }
  Eigen::FullPivLU<CMatrix> lu(poly);
  if (!lu.isInvertible()) {
    throw NumericalError("inverse_psd: MA transfer matrix is singular at f = " +
                         std::to_string(f));
  }
  const CMatrix g_inv = lu.inverse();
  return hermitian_part(g_inv.adjoint() * omega * g_inv);
}

GroundTruth ground_truth_edges(const SynthModel& x, const SynthModel& y) {
  if (x.p != y.p || x.kind != y.kind) {
    throw InvalidArgument("ground_truth_edges: models must share kind and p");
  }
  GroundTruth gt;
  gt.tau = x.kind == ModelKind::kMa3 ? 0.001 : 0.01;
  gt.frequency_points = 51;
  RMatrix d = RMatrix::Zero(x.p, x.p);
  RMatrix bx = RMatrix::Zero(x.p, x.p);
  for (int i = 0; i < gt.frequency_points; ++i) {
    const double f = 0.01 * i;
    const CMatrix ix = inverse_psd(x, f);
    const CMatrix iy = inverse_psd(y, f);
    d += (iy - ix).cwiseAbs();
    bx += ix.cwiseAbs();
  }
  d /= gt.frequency_points;
  bx /= gt.frequency_points;
  gt.d = d;
  gt.b = bx.maxCoeff();
  gt.needs_redraw = gt.b > kPeakyInverseGuard;
  gt.edges = edges_above(d, gt.tau * gt.b);
  return gt;
}

BenchmarkInstance draw_benchmark_instance(ModelKind kind, int p, Rng& rng,
                                          int block_size, int max_redraws) {
  BenchmarkInstance inst;
  for (int attempt = 0; attempt <= max_redraws; ++attempt) {
    inst.models = gen_model_pair(kind, p, rng, block_size);
    inst.truth = ground_truth_edges(inst.models.x, inst.models.y);
    inst.redraws = attempt;
    if (!inst.truth.needs_redraw) return inst;
  }
  throw NumericalError("draw_benchmark_instance: peaky-inverse guard still "
                       "active after " + std::to_string(max_redraws) +
                       " redraws");
}

}  // namespace dtsfd
