#include "semifl/allocator.hpp"
#include "semifl/spectraplex.hpp"

#include <limits>
#include <sstream>

namespace semifl {

Eigen::MatrixXd build_H_matrices(const Eigen::VectorXcd& h) {
  const Index n = h.size();
  Eigen::VectorXd u(2 * n), w(2 * n);
  u << h.real(), h.imag();
  w << h.imag(), -h.real();
  return u * u.transpose() + w * w.transpose();
}

Eigen::VectorXd real_composite(const Eigen::VectorXcd& b) {
  Eigen::VectorXd x(2 * b.size());
  x << b.real(), b.imag();
  return x;
}

Eigen::VectorXcd from_real_composite(const Eigen::VectorXd& x) {
  require(x.size() % 2 == 0, "real composite vector must have even length");
  const Index n = x.size() / 2;
  Eigen::VectorXcd b(n);
  for (Index i = 0; i < n; ++i) b[i] = cplx(x[i], x[n + i]);
  return b;
}

double beamformer_objective(const BeamformerProblem& p, const Beamformers& bf) {
  double f = 0;
  for (std::size_t k = 0; k < p.hG.size(); ++k) f += p.C10 / beam_gain(bf.b, p.hG[k]);
  for (std::size_t k = 0; k < p.hD.size(); ++k) {
    if (p.C9[k] > 0) f += p.C9[k] / beam_gain(bf.v[k], p.hD[k]);
  }
  return f;
}

double beamformer_slack(const BeamformerProblem& p, const Beamformers& bf) {
  double s = std::numeric_limits<double>::infinity();
  if (p.omega > 0) {
    for (const auto& h : p.hG) s = std::min(s, (p.p_max * beam_gain(bf.b, h) - p.omega) / p.omega);
  }
  for (std::size_t k = 0; k < p.hD.size(); ++k) {
    if (p.zeta[k] > 0) s = std::min(s, (p.p_max * beam_gain(bf.v[k], p.hD[k]) - p.zeta[k]) / p.zeta[k]);
  }
  return s;
}

namespace {

constexpr double kSlackTol = 1e-8;

template <typename Scalar>
struct Field;

template <>
struct Field<cplx> {
  using M = Eigen::MatrixXcd;
  static M form(const Eigen::VectorXcd& h) { return h * h.adjoint(); }
  static M lift(const Eigen::VectorXcd& x) { return x * x.adjoint(); }
  static Eigen::VectorXcd lead(const M& W) {
    Eigen::SelfAdjointEigenSolver<M> es(W);
    return canonical_phase(es.eigenvectors().col(W.rows() - 1));
  }
  static M subgradient(const M& W) {
    Eigen::VectorXcd u = lead(W);
    return u * u.adjoint();
  }
};

template <>
struct Field<double> {
  using M = Eigen::MatrixXd;
  static M form(const Eigen::VectorXcd& h) { return build_H_matrices(h); }
  static M lift(const Eigen::VectorXcd& x) {
    Eigen::VectorXd r = real_composite(x);
    return r * r.transpose();
  }
  static Eigen::VectorXd lead_real(const M& W) {
    Eigen::SelfAdjointEigenSolver<M> es(W);
    Eigen::VectorXd u = es.eigenvectors().col(W.rows() - 1);
    Index i = 0;
    u.cwiseAbs().maxCoeff(&i);
    return u[i] < 0 ? Eigen::VectorXd(-u) : u;
  }
  static Eigen::VectorXcd lead(const M& W) { return canonical_phase(from_real_composite(lead_real(W)).normalized()); }
  static M subgradient(const M& W) {
    Eigen::VectorXd u = lead_real(W);
    return u * u.transpose();
  }
};

// One beamformer with its own channels: min sum_j c_j/|x^H h_j|^2, |x^H h_j|^2 >= d_j, |x| = 1.
struct Block {
  std::vector<Eigen::VectorXcd> h;
  Eigen::VectorXd c, d;

  double objective(const Eigen::VectorXcd& x) const {
    double f = 0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (c[j] > 0) f += c[j] / beam_gain(x, h[j]);
    }
    return f;
  }
  double slack(const Eigen::VectorXcd& x) const {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (d[j] > 0) s = std::min(s, (beam_gain(x, h[j]) - d[j]) / d[j]);
    }
    return s;
  }
};

struct BlockOutcome {
  Eigen::VectorXcd x;
  double objective = 0;
  double lower_bound = 0;
  std::vector<double> trace;
  double rank_gap = 0;
  int iterations = 0;
  bool kept_start = false;
};

// Pulls a nearly feasible recovered vector back toward the feasible start along the sphere.
Eigen::VectorXcd repair(const Block& blk, const Eigen::VectorXcd& x, const Eigen::VectorXcd& start) {
  if (blk.slack(x) >= 0) return x;
  cplx phase = start.dot(x);
  Eigen::VectorXcd s = std::abs(phase) > 0 ? Eigen::VectorXcd(start * (phase / std::abs(phase))) : start;
  auto mix = [&](double t) { return Eigen::VectorXcd(((1 - t) * x + t * s).normalized()); };
  double lo = 0, hi = 1;
  if (blk.slack(mix(hi)) < 0) return x;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (blk.slack(mix(mid)) >= 0 ? hi : lo) = mid;
  }
  return mix(hi);
}

template <typename Scalar>
class BlockSolver {
 public:
  using M = sdp::Mat<Scalar>;

  BlockSolver(const Block& blk, const Eigen::VectorXcd& start, const SolverOptions& o)
      : blk_(blk), start_(start), opts_(o) {
    for (const auto& h : blk.h) prog_.A.push_back(Field<Scalar>::form(h));
    prog_.c = blk.c;
    prog_.d = blk.d;
    f_start_ = blk.objective(start);
    scale_ = f_start_ > 0 ? f_start_ : 1.0;
    if (!std::isfinite(f_start_)) fail(ErrorCode::NoFeasibleStart, "start beamformer has zero gain toward a device");
    if (blk.slack(start) < -kSlackTol) {
      std::ostringstream os;
      os << "start beamformer violates a power constraint (relative slack " << blk.slack(start) << ")";
      fail(ErrorCode::NoFeasibleStart, os.str());
    }
    inner_.max_iter = o.inner_max_iter;
    inner_.tol = o.tol_obj;
  }

  bool trivial() const { return blk_.c.maxCoeff() <= 0; }

  // Strictly feasible point near the start, or nullopt when the floors leave no interior.
  std::optional<M> interior_start() const {
    M W0 = Field<Scalar>::lift(start_);
    if (admissible(W0)) return W0;
    std::vector<M> cands;
    const Index n = W0.rows();
    cands.push_back(M::Identity(n, n) / Scalar(static_cast<double>(n)));
    for (const auto& h : blk_.h) cands.push_back(Field<Scalar>::lift(h.normalized()));
    for (double t : {1e-2, 1e-3, 1e-4, 1e-6}) {
      for (const auto& C : cands) {
        M W = Scalar(1 - t) * W0 + Scalar(t) * C;
        if (admissible(W)) return W;
      }
    }
    return std::nullopt;
  }

  sdp::InnerResult<Scalar> relax(const M& W0) const {
    auto r = sdp::solve_inner<Scalar>(prog_, scale_, 0.0, nullptr, W0, inner_);
    check_gap(r);
    return r;
  }

  double penalized(const M& W) const {
    using std::real;
    double f = prog_.objective(prog_.gains(W)) / scale_;
    return f + opts_.beta * (real(W.trace()) - sdp::lambda_max<Scalar>(W));
  }

  struct DcRun {
    M W;
    std::vector<double> trace;
    int iterations = 0;
  };

  DcRun dc(M W) const {
    DcRun run;
    double phi = penalized(W);
    run.trace.push_back(phi);
    sdp::InnerOptions io = inner_;
    for (int it = 0; it < opts_.dc_max_iter; ++it) {
      M S = Field<Scalar>::subgradient(W);
      auto r = sdp::solve_inner<Scalar>(prog_, scale_, opts_.beta, &S, W, io);
      check_gap(r);
      ++run.iterations;
      if (r.mu > 0) io.mu0 = r.mu;
      double next = penalized(r.W);
      if (next > phi + 1e-12 * std::max(1.0, std::abs(phi))) break;
      W = r.W;
      double change = phi - next;
      phi = next;
      run.trace.push_back(phi);
      if (change <= opts_.tol_obj * std::max(1.0, std::abs(phi)) && sdp::rank_gap<Scalar>(W) <= opts_.tol_rank) break;
    }
    run.W = W;
    return run;
  }

  // Recovered beamformer; falls back to the start when recovery is infeasible or worse.
  BlockOutcome recover(const M& W) const {
    BlockOutcome out;
    out.rank_gap = sdp::rank_gap<Scalar>(W);
    Eigen::VectorXcd x = repair(blk_, Field<Scalar>::lead(W), start_);
    double fx = blk_.objective(x);
    if (blk_.slack(x) < -kSlackTol || !(fx <= f_start_)) {
      out.x = start_;
      out.objective = f_start_;
      out.kept_start = true;
      out.rank_gap = 0;
    } else {
      out.x = x;
      out.objective = fx;
    }
    return out;
  }

  BlockOutcome keep_start() const {
    BlockOutcome out;
    out.x = start_;
    out.objective = f_start_;
    out.kept_start = true;
    out.lower_bound = f_start_;
    out.trace.push_back(f_start_ / scale_);
    return out;
  }

  double scale() const { return scale_; }

 private:
  bool admissible(const M& W) const {
    Eigen::VectorXd g = prog_.gains(W);
    for (Index j = 0; j < g.size(); ++j) {
      if (prog_.c[j] > 0 && !(g[j] > 0)) return false;
      if (prog_.d[j] > 0 && !(g[j] > prog_.d[j])) return false;
    }
    return true;
  }

  void check_gap(const sdp::InnerResult<Scalar>& r) const {
    double gap = (r.value - r.lower_bound) / std::max(1.0, std::abs(r.value));
    if (!(gap <= opts_.inner_fail_gap)) {
      std::ostringstream os;
      os << "inner PSD solve stopped with relative gap " << gap << " after " << r.iterations << " iterations";
      fail(ErrorCode::InnerSolverFailure, os.str());
    }
  }

  const Block& blk_;
  Eigen::VectorXcd start_;
  SolverOptions opts_;
  sdp::FractionalProgram<Scalar> prog_;
  sdp::InnerOptions inner_;
  double f_start_ = 0, scale_ = 1;
};

template <typename Scalar>
BlockOutcome solve_block(const Block& blk, const Eigen::VectorXcd& start, const SolverOptions& o, bool relax_only) {
  BlockSolver<Scalar> s(blk, start, o);
  if (s.trivial()) return s.keep_start();
  auto W0 = s.interior_start();
  if (!W0) return s.keep_start();

  if (relax_only) {
    auto r = s.relax(*W0);
    BlockOutcome out = s.recover(r.W);
    out.rank_gap = sdp::rank_gap<Scalar>(r.W);
    out.lower_bound = r.lower_bound * s.scale();
    out.trace.push_back(r.value);
    out.iterations = 1;
    return out;
  }

  std::vector<typename BlockSolver<Scalar>::DcRun> runs;
  runs.push_back(s.dc(*W0));
  if (o.sdr_warm_start) runs.push_back(s.dc(s.relax(*W0).W));
  BlockOutcome best;
  bool have = false;
  int iters = 0;
  for (auto& run : runs) {
    iters += run.iterations;
    BlockOutcome out = s.recover(run.W);
    out.trace = run.trace;
    if (!have || out.objective < best.objective) {
      best = out;
      have = true;
    }
  }
  best.iterations = iters;
  return best;
}

BlockOutcome dispatch(const Block& blk, const Eigen::VectorXcd& start, const SolverOptions& o, bool relax_only) {
  if (o.field == SdpField::RealComposite) return solve_block<double>(blk, start, o, relax_only);
  return solve_block<cplx>(blk, start, o, relax_only);
}

BeamformerResult solve_all(const BeamformerProblem& p, const Beamformers& start, const SolverOptions& opts,
                           bool relax_only) {
  opts.validate();
  const std::size_t K = p.hG.size();
  require(p.hD.size() == K && start.v.size() == K && static_cast<std::size_t>(p.C9.size()) == K &&
              static_cast<std::size_t>(p.zeta.size()) == K,
          "beamformer problem size mismatch");
  require(p.p_max > 0, "p_max must be positive");

  std::vector<BlockOutcome> outs;
  Block b;
  b.h = p.hG;
  b.c = Eigen::VectorXd::Constant(K, p.C10);
  b.d = Eigen::VectorXd::Constant(K, p.omega / p.p_max);
  outs.push_back(dispatch(b, start.b, opts, relax_only));
  for (std::size_t k = 0; k < K; ++k) {
    Block v;
    v.h = {p.hD[k]};
    v.c = Eigen::VectorXd::Constant(1, p.C9[k]);
    v.d = Eigen::VectorXd::Constant(1, p.zeta[k] / p.p_max);
    outs.push_back(dispatch(v, start.v[k], opts, relax_only));
  }

  BeamformerResult r;
  r.bf.b = outs[0].x;
  r.bf.v.resize(K);
  std::size_t len = 0;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (i > 0) r.bf.v[i - 1] = outs[i].x;
    r.relaxation_value += outs[i].lower_bound;
    r.rank_gap = std::max(r.rank_gap, outs[i].rank_gap);
    r.iterations += outs[i].iterations;
    r.kept_start = r.kept_start || outs[i].kept_start;
    len = std::max(len, outs[i].trace.size());
  }
  r.penalized_trace.assign(len, 0.0);
  for (const auto& o : outs) {
    for (std::size_t t = 0; t < len; ++t) r.penalized_trace[t] += o.trace[std::min(t, o.trace.size() - 1)];
  }
  r.objective = beamformer_objective(p, r.bf);
  return r;
}

}  // namespace

BeamformerResult dc_beamformers(const BeamformerProblem& p, const Beamformers& start, const SolverOptions& opts) {
  return solve_all(p, start, opts, false);
}

BeamformerResult sdr_beamformers(const BeamformerProblem& p, const Beamformers& start, const SolverOptions& opts) {
  return solve_all(p, start, opts, true);
}

}  // namespace semifl
