#include "semifl/learners.hpp"

#include <cmath>
#include <limits>

namespace semifl {

namespace {

constexpr std::uint64_t kStructureStream = 0x5354;

Eigen::VectorXd gaussian(Index n, double s, Rng& rng) {
  std::normal_distribution<double> nd(0.0, s);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

Eigen::MatrixXd gather(const Dataset& d, std::span<const Index> idx) {
  Eigen::MatrixXd X(idx.size(), d.X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) X.row(i) = d.X.row(idx[i]);
  return X;
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0) return 1 / (1 + std::exp(-z));
  double e = std::exp(z);
  return e / (1 + e);
}

}  // namespace

const char* learner_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::Quadratic: return "quadratic";
    case LearnerKind::Logistic: return "logistic";
    case LearnerKind::Mlp: return "mlp";
  }
  return "logistic";
}

LearnerKind parse_learner(const std::string& s) {
  for (auto k : {LearnerKind::Quadratic, LearnerKind::Logistic, LearnerKind::Mlp}) {
    if (s == learner_name(k)) return k;
  }
  fail(ErrorCode::ConfigError, "unknown learner '" + s + "'");
}

void LearnerSpec::validate() const {
  require(features >= 2, "learner needs at least 2 features");
  if (kind == LearnerKind::Quadratic) require(shallow_features >= 1 && shallow_features < features, "need 0 < Q1 < Q");
  if (kind == LearnerKind::Logistic)
    require(shallow_features >= 1 && shallow_features <= features, "shallow features must lie in [1, features]");
  require(kind != LearnerKind::Quadratic || (mu > 0 && L >= mu), "quadratic learner needs 0 < mu <= L");
  require(kind != LearnerKind::Mlp || (hidden >= 1 && classes >= 2), "mlp needs hidden >= 1 and classes >= 2");
  require(l2 >= 0 && sample_std >= 0 && separation >= 0, "l2, sample_std and separation must be nonnegative");
}

// ---- quadratic ----

QuadraticLearner::QuadraticLearner(Eigen::MatrixXd H, Eigen::VectorXd w_star, Index q1, double sample_std)
    : H_(std::move(H)), w_star_(std::move(w_star)), q1_(q1), sample_std_(sample_std) {
  require(H_.rows() == H_.cols() && H_.rows() == w_star_.size(), "Hessian/minimizer size mismatch");
  require(q1_ > 0 && q1_ < H_.rows(), "split index must satisfy 0 < q1 < Q");
}

Eigen::VectorXd QuadraticLearner::initial_model(Rng& rng) const { return w_star_ + gaussian(dim(), 1.0, rng); }

Dataset QuadraticLearner::generate(Index per_class, Rng& rng) const {
  Dataset d;
  d.n_classes = 1;
  d.X.resize(per_class, dim());
  d.y = Eigen::VectorXi::Zero(per_class);
  for (Index i = 0; i < per_class; ++i) d.X.row(i) = (w_star_ + gaussian(dim(), sample_std_, rng)).transpose();
  return d;
}

Eigen::VectorXd QuadraticLearner::local_gradient(const Eigen::VectorXd& w, const Dataset& d,
                                                 std::span<const Index> idx) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(dim());
  for (Index i : idx) s += w - d.X.row(i).transpose();
  return H_ * s;
}

Eigen::MatrixXd QuadraticLearner::intermediate(const Eigen::VectorXd& w_shallow, const Dataset& d,
                                               std::span<const Index> idx) const {
  const Index q2 = deep_dim();
  Eigen::MatrixXd A21 = H_.bottomLeftCorner(q2, q1_);
  Eigen::MatrixXd Z(idx.size(), 2 * q2);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Eigen::VectorXd x = d.X.row(idx[i]).transpose();
    Z.row(i).head(q2) = (A21 * (w_shallow - x.head(q1_))).transpose();
    Z.row(i).tail(q2) = x.tail(q2).transpose();
  }
  return Z;
}

Eigen::VectorXd QuadraticLearner::edge_gradient(const Eigen::VectorXd& w_deep, const Eigen::MatrixXd& Z,
                                                std::span<const int>) const {
  const Index q2 = deep_dim();
  Eigen::MatrixXd A22 = H_.bottomRightCorner(q2, q2);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(q2);
  for (Index i = 0; i < Z.rows(); ++i) {
    g += Z.row(i).head(q2).transpose() + A22 * (w_deep - Z.row(i).tail(q2).transpose());
  }
  return g;
}

double QuadraticLearner::loss(const Eigen::VectorXd& w, const Dataset& d) const {
  double s = 0;
  for (Index i = 0; i < d.size(); ++i) {
    Eigen::VectorXd e = w - d.X.row(i).transpose();
    s += 0.5 * e.dot(H_ * e);
  }
  return s / static_cast<double>(d.size());
}

double QuadraticLearner::accuracy(const Eigen::VectorXd&, const Dataset&) const {
  return std::numeric_limits<double>::quiet_NaN();
}

QuadraticObjective QuadraticLearner::objective() const { return {H_, w_star_}; }

// ---- logistic ----

LogisticLearner::LogisticLearner(int features, int q1, double separation, double l2, Rng& structure_rng)
    : d_(features), q1_(q1), l2_(l2) {
  mean_ = gaussian(d_, 1.0, structure_rng).normalized() * (separation / 2);
}

Eigen::VectorXd LogisticLearner::initial_model(Rng& rng) const { return gaussian(dim(), 0.01, rng); }

Dataset LogisticLearner::generate(Index per_class, Rng& rng) const {
  Dataset d;
  d.n_classes = 2;
  d.X.resize(2 * per_class, d_);
  d.y.resize(2 * per_class);
  for (int c = 0; c < 2; ++c) {
    for (Index i = 0; i < per_class; ++i) {
      Index r = c * per_class + i;
      d.X.row(r) = ((c == 1 ? mean_ : Eigen::VectorXd(-mean_)) + gaussian(d_, 1.0, rng)).transpose();
      d.y[r] = c;
    }
  }
  return d;
}

Eigen::VectorXd LogisticLearner::local_gradient(const Eigen::VectorXd& w, const Dataset& d,
                                                std::span<const Index> idx) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  for (Index i : idx) {
    double z = d.X.row(i).dot(w.head(d_)) + w[d_];
    double r = sigmoid(z) - d.y[i];
    g.head(d_) += r * d.X.row(i).transpose();
    g[d_] += r;
  }
  g += l2_ * static_cast<double>(idx.size()) * w;
  return g;
}

Eigen::MatrixXd LogisticLearner::intermediate(const Eigen::VectorXd& w_shallow, const Dataset& d,
                                              std::span<const Index> idx) const {
  const int nb = d_ - q1_;
  Eigen::MatrixXd Z(idx.size(), 1 + nb);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Z(i, 0) = d.X.row(idx[i]).head(q1_).dot(w_shallow);
    Z.row(i).tail(nb) = d.X.row(idx[i]).tail(nb);
  }
  return Z;
}

Eigen::VectorXd LogisticLearner::edge_gradient(const Eigen::VectorXd& w_deep, const Eigen::MatrixXd& Z,
                                               std::span<const int> labels) const {
  const int nb = d_ - q1_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nb + 1);
  for (Index i = 0; i < Z.rows(); ++i) {
    double z = Z(i, 0) + Z.row(i).tail(nb).dot(w_deep.head(nb)) + w_deep[nb];
    double r = sigmoid(z) - labels[i];
    g.head(nb) += r * Z.row(i).tail(nb).transpose();
    g[nb] += r;
  }
  g += l2_ * static_cast<double>(Z.rows()) * w_deep;
  return g;
}

double LogisticLearner::loss(const Eigen::VectorXd& w, const Dataset& d) const {
  Eigen::VectorXd z = (d.X * w.head(d_)).array() + w[d_];
  double s = 0;
  for (Index i = 0; i < d.size(); ++i) s += softplus(z[i]) - d.y[i] * z[i];
  return s / static_cast<double>(d.size()) + 0.5 * l2_ * w.squaredNorm();
}

double LogisticLearner::accuracy(const Eigen::VectorXd& w, const Dataset& d) const {
  Eigen::VectorXd z = (d.X * w.head(d_)).array() + w[d_];
  Index hit = 0;
  for (Index i = 0; i < d.size(); ++i) hit += (z[i] > 0 ? 1 : 0) == d.y[i];
  return static_cast<double>(hit) / static_cast<double>(d.size());
}

// ---- mlp ----

MlpLearner::MlpLearner(int features, int hidden, int classes, double separation, double l2, Rng& structure_rng)
    : d_(features), h_(hidden), c_(classes), l2_(l2) {
  means_.resize(c_, d_);
  for (int c = 0; c < c_; ++c) means_.row(c) = gaussian(d_, separation, structure_rng).transpose();
}

Eigen::VectorXd MlpLearner::initial_model(Rng& rng) const {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim());
  w.head(h_ * d_) = gaussian(h_ * d_, 1.0 / std::sqrt(d_), rng);
  w.segment(h_ * d_ + h_, c_ * h_) = gaussian(c_ * h_, 1.0 / std::sqrt(h_), rng);
  return w;
}

Dataset MlpLearner::generate(Index per_class, Rng& rng) const {
  Dataset d;
  d.n_classes = c_;
  d.X.resize(c_ * per_class, d_);
  d.y.resize(c_ * per_class);
  for (int c = 0; c < c_; ++c) {
    for (Index i = 0; i < per_class; ++i) {
      Index r = c * per_class + i;
      d.X.row(r) = means_.row(c) + gaussian(d_, 1.0, rng).transpose();
      d.y[r] = c;
    }
  }
  return d;
}

namespace {

struct MlpView {
  Eigen::Map<const Eigen::MatrixXd> W1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::MatrixXd> W2;
  Eigen::Map<const Eigen::VectorXd> b2;
};

MlpView view(const double* p, int d, int h, int c) {
  return {Eigen::Map<const Eigen::MatrixXd>(p, h, d), Eigen::Map<const Eigen::VectorXd>(p + h * d, h),
          Eigen::Map<const Eigen::MatrixXd>(p + h * d + h, c, h),
          Eigen::Map<const Eigen::VectorXd>(p + h * d + h + c * h, c)};
}

// Row-wise softmax minus one-hot labels.
Eigen::MatrixXd softmax_residual(const Eigen::MatrixXd& O, std::span<const int> labels) {
  Eigen::MatrixXd P(O.rows(), O.cols());
  for (Index i = 0; i < O.rows(); ++i) {
    Eigen::RowVectorXd e = (O.row(i).array() - O.row(i).maxCoeff()).exp();
    P.row(i) = e / e.sum();
    P(i, labels[i]) -= 1;
  }
  return P;
}

}  // namespace

Eigen::MatrixXd MlpLearner::logits(const Eigen::VectorXd& w, const Dataset& d) const {
  MlpView m = view(w.data(), d_, h_, c_);
  Eigen::MatrixXd Z = ((d.X * m.W1.transpose()).rowwise() + m.b1.transpose()).array().tanh();
  return (Z * m.W2.transpose()).rowwise() + m.b2.transpose();
}

Eigen::VectorXd MlpLearner::local_gradient(const Eigen::VectorXd& w, const Dataset& d,
                                           std::span<const Index> idx) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  if (idx.empty()) return g;
  MlpView m = view(w.data(), d_, h_, c_);
  Eigen::MatrixXd X = gather(d, idx);
  std::vector<int> labels(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = d.y[idx[i]];
  Eigen::MatrixXd Z = ((X * m.W1.transpose()).rowwise() + m.b1.transpose()).array().tanh();
  Eigen::MatrixXd O = (Z * m.W2.transpose()).rowwise() + m.b2.transpose();
  Eigen::MatrixXd Dout = softmax_residual(O, labels);
  Eigen::MatrixXd Da = (Dout * m.W2).array() * (1 - Z.array().square());
  Eigen::Map<Eigen::MatrixXd>(g.data(), h_, d_) = Da.transpose() * X;
  g.segment(h_ * d_, h_) = Da.colwise().sum().transpose();
  Eigen::Map<Eigen::MatrixXd>(g.data() + h_ * d_ + h_, c_, h_) = Dout.transpose() * Z;
  g.tail(c_) = Dout.colwise().sum().transpose();
  g += l2_ * static_cast<double>(idx.size()) * w;
  return g;
}

Eigen::MatrixXd MlpLearner::intermediate(const Eigen::VectorXd& w_shallow, const Dataset& d,
                                         std::span<const Index> idx) const {
  Eigen::Map<const Eigen::MatrixXd> W1(w_shallow.data(), h_, d_);
  Eigen::Map<const Eigen::VectorXd> b1(w_shallow.data() + h_ * d_, h_);
  Eigen::MatrixXd X = gather(d, idx);
  return ((X * W1.transpose()).rowwise() + b1.transpose()).array().tanh();
}

Eigen::VectorXd MlpLearner::edge_gradient(const Eigen::VectorXd& w_deep, const Eigen::MatrixXd& Z,
                                          std::span<const int> labels) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(deep_dim());
  if (Z.rows() == 0) return g;
  Eigen::Map<const Eigen::MatrixXd> W2(w_deep.data(), c_, h_);
  Eigen::Map<const Eigen::VectorXd> b2(w_deep.data() + c_ * h_, c_);
  Eigen::MatrixXd O = (Z * W2.transpose()).rowwise() + b2.transpose();
  Eigen::MatrixXd Dout = softmax_residual(O, labels);
  Eigen::Map<Eigen::MatrixXd>(g.data(), c_, h_) = Dout.transpose() * Z;
  g.tail(c_) = Dout.colwise().sum().transpose();
  g += l2_ * static_cast<double>(Z.rows()) * w_deep;
  return g;
}

double MlpLearner::loss(const Eigen::VectorXd& w, const Dataset& d) const {
  Eigen::MatrixXd O = logits(w, d);
  double s = 0;
  for (Index i = 0; i < O.rows(); ++i) {
    double mx = O.row(i).maxCoeff();
    s += mx + std::log((O.row(i).array() - mx).exp().sum()) - O(i, d.y[i]);
  }
  return s / static_cast<double>(d.size()) + 0.5 * l2_ * w.squaredNorm();
}

double MlpLearner::accuracy(const Eigen::VectorXd& w, const Dataset& d) const {
  Eigen::MatrixXd O = logits(w, d);
  Index hit = 0;
  for (Index i = 0; i < O.rows(); ++i) {
    Index c = 0;
    O.row(i).maxCoeff(&c);
    hit += c == d.y[i];
  }
  return static_cast<double>(hit) / static_cast<double>(d.size());
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = make_rng(seed, kStructureStream);
  switch (spec.kind) {
    case LearnerKind::Quadratic: {
      const int Q = spec.features;
      Eigen::MatrixXd G(Q, Q);
      for (int j = 0; j < Q; ++j) G.col(j) = gaussian(Q, 1.0, rng);
      Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
      Eigen::VectorXd lam = Eigen::VectorXd::LinSpaced(Q, spec.mu, spec.L);
      Eigen::MatrixXd H = U * lam.asDiagonal() * U.transpose();
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::VectorXd w_star = gaussian(Q, 1.0, rng);
      return std::make_unique<QuadraticLearner>(H, w_star, spec.shallow_features, spec.sample_std);
    }
    case LearnerKind::Logistic:
      return std::make_unique<LogisticLearner>(spec.features, spec.shallow_features, spec.separation, spec.l2, rng);
    case LearnerKind::Mlp:
      return std::make_unique<MlpLearner>(spec.features, spec.hidden, spec.classes, spec.separation, spec.l2, rng);
  }
  fail(ErrorCode::InvalidArgument, "unknown learner kind");
}

}  // namespace semifl
