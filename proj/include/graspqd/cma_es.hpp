#pragma once

#include <Eigen/Core>

#include <random>
#include <vector>

namespace graspqd {

/// Plain (mu/mu_w, lambda) CMA-ES with cumulative step-size adaptation.
class CmaEs {
 public:
  CmaEs(const Eigen::VectorXd& mean, double sigma, int lambda);

  std::vector<Eigen::VectorXd> ask(std::mt19937_64& rng) const;
  /// `ranked` holds the evaluated points, best first; only the first mu
  /// enter the update.
  void tell(const std::vector<Eigen::VectorXd>& ranked);
  bool converged() const;
  void reset(const Eigen::VectorXd& mean, double sigma);

  const Eigen::VectorXd& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  int lambda() const { return lambda_; }
  int mu() const { return mu_; }
  const Eigen::MatrixXd& covariance() const { return c_; }

 private:
  void decompose();

  int n_;
  int lambda_;
  int mu_;
  Eigen::VectorXd weights_;
  double mueff_, cc_, cs_, c1_, cmu_, damps_, chin_;
  Eigen::VectorXd mean_;
  double sigma_;
  Eigen::MatrixXd c_, b_;
  Eigen::VectorXd d_;
  Eigen::VectorXd pc_, ps_;
  int generation_ = 0;
};

}  // namespace graspqd
