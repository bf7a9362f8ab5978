#include "semifl/semifl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace semifl {

namespace {

// Integer counts summing to D, largest remainder first (ties to the lower class id).
std::vector<int> round_counts(const Eigen::VectorXd& p, int D) {
  const Index C = p.size();
  std::vector<int> n(C);
  std::vector<std::pair<double, Index>> rem(C);
  int used = 0;
  for (Index c = 0; c < C; ++c) {
    double x = p[c] * D;
    n[c] = static_cast<int>(std::floor(x));
    used += n[c];
    rem[c] = {x - n[c], c};
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; used < D; ++i, ++used) ++n[rem[i % C].second];
  return n;
}

Eigen::VectorXd dirichlet(int C, double alpha, Rng& rng) {
  std::gamma_distribution<double> g(alpha, 1.0);
  Eigen::VectorXd p(C);
  for (int c = 0; c < C; ++c) p[c] = g(rng);
  double s = p.sum();
  if (!(s > 0)) {
    // every draw underflowed: all mass on one class
    p.setZero();
    p[std::uniform_int_distribution<int>(0, C - 1)(rng)] = 1;
    return p;
  }
  return p / s;
}

}  // namespace

DataPartition partition_data(const Eigen::VectorXi& labels, int n_classes, int K, int D, const PartitionSpec& spec,
                             Rng& rng) {
  require(n_classes >= 1 && K >= 1 && D >= 1, "partition needs C >= 1, K >= 1, D >= 1");
  bool iid = spec.scheme == PartitionSpec::Scheme::Iid || std::isinf(spec.alpha);
  require(iid || spec.alpha > 0, "dirichlet alpha must be positive");
  require(iid || n_classes >= 2, "dirichlet partition needs at least 2 classes");
  if (static_cast<long>(labels.size()) < static_cast<long>(K) * D) {
    std::ostringstream os;
    os << "pooled dataset has " << labels.size() << " samples, K*D = " << static_cast<long>(K) * D;
    fail(ErrorCode::InsufficientData, os.str());
  }

  std::vector<std::vector<Index>> pools(n_classes);
  for (Index i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && labels[i] < n_classes, "label out of range");
    pools[labels[i]].push_back(i);
  }
  for (auto& p : pools) std::shuffle(p.begin(), p.end(), rng);
  std::vector<std::size_t> next(n_classes, 0);

  DataPartition out;
  out.indices.resize(K);
  out.proportions = Eigen::MatrixXd::Zero(K, n_classes);
  for (int k = 0; k < K; ++k) {
    std::vector<int> counts(n_classes, 0);
    if (iid) {
      for (int j = 0; j < n_classes; ++j) counts[j] = D / n_classes;
      for (int j = 0; j < D % n_classes; ++j) ++counts[(k + j) % n_classes];
    } else {
      counts = round_counts(dirichlet(n_classes, spec.alpha, rng), D);
    }
    for (int c = 0; c < n_classes; ++c) {
      if (next[c] + counts[c] > pools[c].size()) {
        std::ostringstream os;
        os << "class " << c << " pool exhausted at device " << k;
        fail(ErrorCode::InsufficientData, os.str());
      }
      for (int j = 0; j < counts[c]; ++j) out.indices[k].push_back(pools[c][next[c]++]);
      out.proportions(k, c) = static_cast<double>(counts[c]) / D;
    }
  }
  return out;
}

double heterogeneity_delta(const Eigen::MatrixXd& proportions) {
  const double C = static_cast<double>(proportions.cols());
  return (proportions.array() - 1.0 / C).square().sum();
}

double heterogeneity_delta(const DataPartition& p) { return heterogeneity_delta(p.proportions); }

}  // namespace semifl
