#include "graspqd/cma_es.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace graspqd {

CmaEs::CmaEs(const Eigen::VectorXd& mean, double sigma, int lambda)
    : n_(static_cast<int>(mean.size())), lambda_(lambda), mu_(lambda / 2) {
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i) weights_[i] = std::log(mu_ + 0.5) - std::log(i + 1.0);
  weights_ /= weights_.sum();
  mueff_ = 1.0 / weights_.squaredNorm();
  const double n = n_;
  cc_ = (4.0 + mueff_ / n) / (n + 4.0 + 2.0 * mueff_ / n);
  cs_ = (mueff_ + 2.0) / (n + mueff_ + 5.0);
  c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mueff_);
  cmu_ = std::min(1.0 - c1_, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) / ((n + 2.0) * (n + 2.0) + mueff_));
  damps_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (n + 1.0)) - 1.0) + cs_;
  chin_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  reset(mean, sigma);
}

void CmaEs::reset(const Eigen::VectorXd& mean, double sigma) {
  mean_ = mean;
  sigma_ = sigma;
  c_ = Eigen::MatrixXd::Identity(n_, n_);
  b_ = Eigen::MatrixXd::Identity(n_, n_);
  d_ = Eigen::VectorXd::Ones(n_);
  pc_ = Eigen::VectorXd::Zero(n_);
  ps_ = Eigen::VectorXd::Zero(n_);
  generation_ = 0;
}

std::vector<Eigen::VectorXd> CmaEs::ask(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> out(lambda_);
  for (auto& x : out) {
    Eigen::VectorXd z(n_);
    for (int i = 0; i < n_; ++i) z[i] = normal(rng);
    x = mean_ + sigma_ * (b_ * d_.asDiagonal() * z);
  }
  return out;
}

void CmaEs::tell(const std::vector<Eigen::VectorXd>& ranked) {
  const Eigen::VectorXd old = mean_;
  mean_.setZero();
  for (int i = 0; i < mu_; ++i) mean_ += weights_[i] * ranked[i];
  const Eigen::VectorXd step = (mean_ - old) / sigma_;

  const Eigen::MatrixXd inv_sqrt_c = b_ * d_.cwiseInverse().asDiagonal() * b_.transpose();
  ps_ = (1.0 - cs_) * ps_ + std::sqrt(cs_ * (2.0 - cs_) * mueff_) * (inv_sqrt_c * step);
  ++generation_;
  const double ps_norm = ps_.norm();
  const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * generation_)) / chin_ <
                    1.4 + 2.0 / (n_ + 1.0);
  pc_ = (1.0 - cc_) * pc_ + (hsig ? std::sqrt(cc_ * (2.0 - cc_) * mueff_) : 0.0) * step;

  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < mu_; ++i) {
    const Eigen::VectorXd y = (ranked[i] - old) / sigma_;
    rank_mu += weights_[i] * y * y.transpose();
  }
  c_ = (1.0 - c1_ - cmu_) * c_ +
       c1_ * (pc_ * pc_.transpose() + (hsig ? 0.0 : cc_ * (2.0 - cc_)) * c_) + cmu_ * rank_mu;
  sigma_ *= std::exp((cs_ / damps_) * (ps_norm / chin_ - 1.0));
  decompose();
}

void CmaEs::decompose() {
  c_ = 0.5 * (c_ + c_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c_);
  b_ = eig.eigenvectors();
  d_ = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
}

bool CmaEs::converged() const {
  if (!std::isfinite(sigma_) || !mean_.allFinite()) return true;
  const double max_d = d_.maxCoeff();
  const double min_d = d_.minCoeff();
  if (sigma_ * max_d < 1e-8) return true;
  if (max_d / min_d > 1e7) return true;  // condition number of C above 1e14
  return false;
}

}  // namespace graspqd
