#pragma once

#include "semifl/theory.hpp"

#include <memory>
#include <span>

namespace semifl {

// Row-per-sample dataset; labels are class ids (all zero for the quadratic learner).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXi y;
  int n_classes = 1;

  Index size() const { return X.rows(); }
};

enum class LearnerKind { Quadratic, Logistic, Mlp };

const char* learner_name(LearnerKind k);
LearnerKind parse_learner(const std::string& s);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::Logistic;
  int features = 20;         // input dimension (quadratic: Q)
  int shallow_features = 10; // logistic: features seen by the shallow part; quadratic: Q1
  int hidden = 16;           // mlp
  int classes = 10;          // mlp
  double separation = 1.0;   // distance between class means
  double l2 = 1e-3;          // per-sample ridge term
  double mu = 1.0, L = 2.0;  // quadratic Hessian spectrum
  double sample_std = 1.0;   // quadratic sample spread around w*

  void validate() const;
};

// Model w = [shallow (Q1); deep (Q2)]. Gradients are sums over the given samples.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual Index dim() const = 0;
  virtual Index shallow_dim() const = 0;
  Index deep_dim() const { return dim() - shallow_dim(); }
  virtual int n_classes() const = 0;

  virtual Eigen::VectorXd initial_model(Rng& rng) const = 0;
  virtual Dataset generate(Index per_class, Rng& rng) const = 0;

  virtual Eigen::VectorXd local_gradient(const Eigen::VectorXd& w, const Dataset& d,
                                         std::span<const Index> idx) const = 0;
  // On-device forward pass through the shallow part; one row per sample.
  virtual Eigen::MatrixXd intermediate(const Eigen::VectorXd& w_shallow, const Dataset& d,
                                       std::span<const Index> idx) const = 0;
  // Deep-part gradient at the BS from intermediate outputs; length Q2.
  virtual Eigen::VectorXd edge_gradient(const Eigen::VectorXd& w_deep, const Eigen::MatrixXd& Z,
                                        std::span<const int> labels) const = 0;

  virtual double loss(const Eigen::VectorXd& w, const Dataset& d) const = 0;  // mean over samples
  virtual double accuracy(const Eigen::VectorXd& w, const Dataset& d) const = 0;  // NaN when undefined
};

// f(w; x) = 1/2 (w - x)^T H (w - x); samples x = w* + noise.
class QuadraticLearner : public Learner {
 public:
  QuadraticLearner(Eigen::MatrixXd H, Eigen::VectorXd w_star, Index q1, double sample_std);

  Index dim() const override { return H_.rows(); }
  Index shallow_dim() const override { return q1_; }
  int n_classes() const override { return 1; }
  Eigen::VectorXd initial_model(Rng& rng) const override;
  Dataset generate(Index per_class, Rng& rng) const override;
  Eigen::VectorXd local_gradient(const Eigen::VectorXd& w, const Dataset& d,
                                 std::span<const Index> idx) const override;
  Eigen::MatrixXd intermediate(const Eigen::VectorXd& w_shallow, const Dataset& d,
                               std::span<const Index> idx) const override;
  Eigen::VectorXd edge_gradient(const Eigen::VectorXd& w_deep, const Eigen::MatrixXd& Z,
                                std::span<const int> labels) const override;
  double loss(const Eigen::VectorXd& w, const Dataset& d) const override;
  double accuracy(const Eigen::VectorXd&, const Dataset&) const override;

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& w_star() const { return w_star_; }
  // Population objective 1/2 (w - w*)^T H (w - w*).
  QuadraticObjective objective() const;

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd w_star_;
  Index q1_;
  double sample_std_;
};

// Binary logistic regression with a vertical feature split: the shallow part holds the weights
// of the first q1 features, the deep part the remaining weights and the bias.
class LogisticLearner : public Learner {
 public:
  LogisticLearner(int features, int q1, double separation, double l2, Rng& structure_rng);

  Index dim() const override { return d_ + 1; }
  Index shallow_dim() const override { return q1_; }
  int n_classes() const override { return 2; }
  Eigen::VectorXd initial_model(Rng& rng) const override;
  Dataset generate(Index per_class, Rng& rng) const override;
  Eigen::VectorXd local_gradient(const Eigen::VectorXd& w, const Dataset& d,
                                 std::span<const Index> idx) const override;
  Eigen::MatrixXd intermediate(const Eigen::VectorXd& w_shallow, const Dataset& d,
                               std::span<const Index> idx) const override;
  Eigen::VectorXd edge_gradient(const Eigen::VectorXd& w_deep, const Eigen::MatrixXd& Z,
                                std::span<const int> labels) const override;
  double loss(const Eigen::VectorXd& w, const Dataset& d) const override;
  double accuracy(const Eigen::VectorXd& w, const Dataset& d) const override;

 private:
  int d_, q1_;
  double l2_;
  Eigen::VectorXd mean_;  // class 1 centered at +mean_, class 0 at -mean_
};

// One tanh hidden layer (shallow) and a softmax output layer (deep).
class MlpLearner : public Learner {
 public:
  MlpLearner(int features, int hidden, int classes, double separation, double l2, Rng& structure_rng);

  Index dim() const override { return h_ * d_ + h_ + c_ * h_ + c_; }
  Index shallow_dim() const override { return h_ * d_ + h_; }
  int n_classes() const override { return c_; }
  Eigen::VectorXd initial_model(Rng& rng) const override;
  Dataset generate(Index per_class, Rng& rng) const override;
  Eigen::VectorXd local_gradient(const Eigen::VectorXd& w, const Dataset& d,
                                 std::span<const Index> idx) const override;
  Eigen::MatrixXd intermediate(const Eigen::VectorXd& w_shallow, const Dataset& d,
                               std::span<const Index> idx) const override;
  Eigen::VectorXd edge_gradient(const Eigen::VectorXd& w_deep, const Eigen::MatrixXd& Z,
                                std::span<const int> labels) const override;
  double loss(const Eigen::VectorXd& w, const Dataset& d) const override;
  double accuracy(const Eigen::VectorXd& w, const Dataset& d) const override;

 private:
  Eigen::MatrixXd logits(const Eigen::VectorXd& w, const Dataset& d) const;

  int d_, h_, c_;
  double l2_;
  Eigen::MatrixXd means_;  // c x d
};

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, std::uint64_t seed);

}  // namespace semifl
