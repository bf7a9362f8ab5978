#include "semifl/aircomp.hpp"

namespace semifl {

cplx tx_power_gradient(const Eigen::VectorXcd& b, const Eigen::VectorXcd& h, double omega) {
  require(omega >= 0, "omega must be nonnegative");
  cplx g = b.dot(h);  // b^H h
  if (std::abs(g) < kUnservableGain) fail(ErrorCode::UnservableDevice, "|b^H h| below 1e-12");
  return std::sqrt(omega) * std::conj(g) / std::norm(g);
}

NormalizedGradient normalize_gradient(const Eigen::Ref<const Eigen::VectorXd>& g) {
  require(g.size() > 0, "empty gradient");
  require(g.allFinite(), "gradient must be finite");
  NormalizedGradient out;
  out.stats.mean = g.mean();
  double var = (g.array() - out.stats.mean).square().mean();
  out.stats.std = std::sqrt(var);
  if (out.stats.std == 0.0) {
    out.stats.constant = true;
    out.ghat = Eigen::VectorXd::Zero(g.size());
  } else {
    out.ghat = (g.array() - out.stats.mean) / out.stats.std;
  }
  return out;
}

Eigen::VectorXd denormalize(const Eigen::Ref<const Eigen::VectorXd>& ghat, const NormalizationStats& s) {
  return (ghat.array() * s.std + s.mean).matrix();
}

Eigen::VectorXd denormalize_aggregate(const Eigen::Ref<const Eigen::VectorXd>& agg,
                                      const std::vector<NormalizationStats>& stats) {
  require(!stats.empty(), "no normalization stats");
  double m = 0, s = 0;
  for (const auto& st : stats) {
    m += st.mean;
    s += st.std;
  }
  m /= static_cast<double>(stats.size());
  s /= static_cast<double>(stats.size());
  return (agg.array() * s + m).matrix();
}

Eigen::VectorXd aggregate_over_air(const std::vector<Eigen::VectorXd>& ghat, const Beamformers& bf,
                                   const ChannelRealization& ch, const ScalingFactors& sf,
                                   const NoiseModel& noise, Rng& rng) {
  const int K = static_cast<int>(ghat.size());
  require(K >= 1 && ch.K() == K, "one normalized gradient per device required");
  require(sf.nu > 0, "nu must be positive");
  const Index Q = ghat[0].size();
  for (const auto& g : ghat) require(g.size() == Q, "gradient lengths differ");

  // Effective complex gain of device k after beamforming.
  Eigen::VectorXcd gain(K);
  for (int k = 0; k < K; ++k) {
    cplx p = tx_power_gradient(bf.b, ch.hG[k], sf.omega);
    gain[k] = bf.b.dot(ch.propagation_G(k)) * p;
  }

  const double inv_sqrt_nu = 1.0 / std::sqrt(sf.nu);
  const bool noiseless = noise.kind == NoiseModel::Kind::Gaussian && noise.sigma2 == 0;
  const Index N_r = bf.b.size();
  Eigen::VectorXd out(Q);
  for (Index q = 0; q < Q; ++q) {
    cplx y = 0;
    for (int k = 0; k < K; ++k) y += gain[k] * ghat[k][q];
    y /= static_cast<double>(K);
    if (!noiseless) y += bf.b.dot(sample_noise(noise, N_r, rng));
    out[q] = y.real() * inv_sqrt_nu;
  }
  return out;
}

Eigen::VectorXcd canonical_phase(const Eigen::VectorXcd& x) {
  Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (std::abs(x[imax]) == 0) return x;
  cplx ph = std::conj(x[imax]) / std::abs(x[imax]);
  return x * ph;
}

Beamformers matched_filter(const ChannelRealization& ch) {
  const int K = ch.K();
  require(K >= 1, "empty realization");
  const Index N = ch.hG[0].size();
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
  for (int k = 0; k < K; ++k) {
    double n2 = ch.hG[k].squaredNorm();
    if (n2 > 0) S += ch.hG[k] * ch.hG[k].adjoint() / n2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
  Beamformers bf;
  bf.b = canonical_phase(es.eigenvectors().col(N - 1).normalized());
  for (int k = 0; k < K; ++k) {
    double n = ch.hD[k].norm();
    if (n > 0) {
      bf.v.push_back(ch.hD[k] / n);
    } else {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(N);
      e[0] = 1;
      bf.v.push_back(e);
    }
  }
  return bf;
}

}  // namespace semifl
