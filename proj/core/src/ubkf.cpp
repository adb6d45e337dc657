#include "kssync/ubkf.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "kssync/master.hpp"

namespace kssync {

RealVector encode_state(const ModelParams& theta, const SpectralCoefficients& a) {
  const int K = a.order();
  RealVector s(ubkf_dimension(K));
  s[0] = theta.alpha;
  s[1] = theta.beta;
  s[2] = theta.gamma;
  s[3] = a[0].real();
  for (int k = 1; k <= K; ++k) {
    s[2 + 2 * k] = a[k].real();
    s[3 + 2 * k] = a[k].imag();
  }
  return s;
}

ModelParams decode_params(const RealVector& s) { return {s[0], s[1], s[2]}; }

SpectralCoefficients decode_coeffs(const RealVector& s) {
  const int K = static_cast<int>((s.size() - 4) / 2);
  ComplexVector c(K + 1);
  c[0] = s[3];
  for (int k = 1; k <= K; ++k) c[k] = Complex(s[2 + 2 * k], s[3 + 2 * k]);
  return SpectralCoefficients(std::move(c));
}

FilterState make_filter_state(const SpectralCoefficients& a0, double measurement_noise_var,
                              const UbkfOptions& opts) {
  const int n = ubkf_dimension(a0.order());
  FilterState s;
  s.mean = encode_state(opts.theta_prior, a0);
  s.covariance = RealMatrix::Identity(n, n) * opts.prior_var;
  s.process_noise = RealVector::Constant(n, opts.coeff_process_noise);
  s.process_noise.head(3).setConstant(opts.theta_process_noise);
  s.measurement_noise_var = measurement_noise_var;
  return s;
}

namespace {

bool factorize(const RealMatrix& P, RealMatrix& L) {
  Eigen::LLT<RealMatrix> llt(P);
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  return L.allFinite();
}

void symmetrize(RealMatrix& P) { P = 0.5 * (P + P.transpose()).eval(); }

}  // namespace

CubatureSet cubature_points(const RealVector& mean, const RealMatrix& covariance) {
  const Eigen::Index n = mean.size();
  if (covariance.rows() != n || covariance.cols() != n)
    throw std::invalid_argument("cubature_points: covariance shape mismatch");
  RealMatrix L;
  if (!factorize(covariance, L)) {
    const RealMatrix jittered = covariance + 1e-12 * RealMatrix::Identity(n, n);
    if (!factorize(jittered, L))
      throw std::runtime_error("cubature_points: covariance is not positive semidefinite");
  }
  const double scale = std::sqrt(static_cast<double>(n));
  CubatureSet set;
  set.points.reserve(2 * n);
  set.weights.assign(2 * n, 1.0 / (2.0 * static_cast<double>(n)));
  for (Eigen::Index i = 0; i < n; ++i) set.points.push_back(mean + scale * L.col(i));
  for (Eigen::Index i = 0; i < n; ++i) set.points.push_back(mean - scale * L.col(i));
  return set;
}

RealMatrix measurement_matrix(const std::vector<double>& grid, double X, int K) {
  const double w0 = 2.0 * std::numbers::pi / X;
  const auto J = static_cast<Eigen::Index>(grid.size());
  RealMatrix H = RealMatrix::Zero(J, ubkf_dimension(K));
  for (Eigen::Index j = 0; j < J; ++j) {
    H(j, 3) = 1.0;
    for (int k = 1; k <= K; ++k) {
      const double ph = w0 * k * grid[j];
      H(j, 2 + 2 * k) = 2.0 * std::cos(ph);
      H(j, 3 + 2 * k) = -2.0 * std::sin(ph);
    }
  }
  return H;
}

CubatureFilter::CubatureFilter(const ObservationSetup& setup, const DomainConfig& cfg, int K,
                               bool nonlinear)
    : cfg_(cfg), H_(measurement_matrix(setup.grid(), setup.period(), K)), nonlinear_(nonlinear) {}

void CubatureFilter::predict(FilterState& s) const {
  CubatureSet set = cubature_points(s.mean, s.covariance);
  const double w0 = cfg_.omega0();
  for (auto& p : set.points) {
    const ModelParams theta = decode_params(p);
    SpectralCoefficients a = decode_coeffs(p);
    ComplexVector rhs = nonlinear_ ? master_rhs(a, theta, w0)
                                   : ComplexVector(linear_diag(theta, w0, a.order()).cwiseProduct(a.vec()));
    a.axpy(cfg_.h, rhs);
    p.segment(3, p.size() - 3) = encode_state(theta, a).segment(3, p.size() - 3);
  }
  const Eigen::Index n = s.mean.size();
  RealVector m = RealVector::Zero(n);
  for (std::size_t i = 0; i < set.points.size(); ++i) m += set.weights[i] * set.points[i];
  RealMatrix P = RealMatrix::Zero(n, n);
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const RealVector d = set.points[i] - m;
    P.noalias() += set.weights[i] * d * d.transpose();
  }
  P.diagonal() += cfg_.h * s.process_noise;
  symmetrize(P);
  s.mean = std::move(m);
  s.covariance = std::move(P);
}

void CubatureFilter::update(FilterState& s, const RealVector& u_obs) const {
  if (u_obs.size() != H_.rows()) throw std::invalid_argument("ubkf: observation length mismatch");
  const RealMatrix PHt = s.covariance * H_.transpose();  // n x J
  RealMatrix S = H_ * PHt;
  S.diagonal().array() += s.measurement_noise_var;
  Eigen::LLT<RealMatrix> llt(S);
  if (llt.info() != Eigen::Success) {
    S.diagonal().array() += 1e-12;
    llt.compute(S);
    if (llt.info() != Eigen::Success) throw std::runtime_error("ubkf: innovation covariance not PD");
  }
  // Gain^T = S^{-1} (P H^T)^T.
  const RealMatrix gainT = llt.solve(PHt.transpose());
  const RealVector innovation = u_obs - H_ * s.mean;
  s.mean.noalias() += gainT.transpose() * innovation;
  s.covariance.noalias() -= PHt * gainT;
  symmetrize(s.covariance);
}

FilterState ubkf_step(const FilterState& state, const RealVector& u_obs, const ObservationSetup& setup,
                      const DomainConfig& cfg) {
  const CubatureFilter filter(setup, cfg, state.order());
  FilterState next = state;
  filter.step(next, u_obs);
  return next;
}

namespace {

void record(RunTrace& trace, double t, const FilterState& s, const SpectralCoefficients& truth,
            const ModelParams& theta_true) {
  const SpectralCoefficients est = decode_coeffs(s.mean);
  const int K = std::min(est.order(), truth.order());
  const SpectralCoefficients e = error_coeffs(truth, est.resized(K));
  const ModelParams th = decode_params(s.mean);
  trace.push(t, normalized_mse(e, truth), cost_C(e), th, param_sq_err_mixed(th, theta_true));
}

}  // namespace

UbkfResult run_ubkf(const FilterState& init, const ObservationStream& observations,
                    const ObservationSetup& setup, const DomainConfig& cfg, const TruthSource& truth,
                    const ModelParams& theta_true, long trace_stride, bool nonlinear) {
  if (trace_stride < 1) throw std::invalid_argument("trace_stride must be >= 1");
  const CubatureFilter filter(setup, cfg, init.order(), nonlinear);
  UbkfResult res{init, {}};
  record(res.trace, 0.0, res.final_state, truth(0), theta_true);
  long i = 1;
  bool recorded_last = true;
  for (;; ++i) {
    std::optional<RealVector> u = observations(i);
    if (!u) break;
    filter.step(res.final_state, *u);
    if (!(res.final_state.mean.cwiseAbs().maxCoeff() <= kDivergenceThreshold) ||
        !res.final_state.covariance.allFinite())
      throw DivergenceError("ubkf", i);
    recorded_last = (i % trace_stride == 0);
    if (recorded_last) record(res.trace, static_cast<double>(i) * cfg.h, res.final_state, truth(i), theta_true);
  }
  if (!recorded_last) {
    const long last = i - 1;
    record(res.trace, static_cast<double>(last) * cfg.h, res.final_state, truth(last), theta_true);
  }
  return res;
}

}  // namespace kssync
