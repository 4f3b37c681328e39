// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/mh.hpp"

#include <algorithm>

namespace mmnl {

void MhConfig::validate() const {
  if (!(proposal_scale >= 0.0) || !std::isfinite(proposal_scale)) {
    throw InvalidInput("mh.proposal_scale must be finite and nonnegative");
  }
  if (steps_per_update < 1) {
    throw InvalidInput("mh.steps_per_update must be >= 1");
  }
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw InvalidInput("mh.target_acceptance must lie in (0, 1)");
  }
}

Matrix proposal_factor(const Matrix& cov) {
  const Eigen::Index d = cov.rows();
  if (cov.allFinite() && cov.rows() == cov.cols()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= 1e-10) {
      Eigen::LLT<Matrix> llt(cov);
      if (llt.info() == Eigen::Success) return llt.matrixL();
    }
  }
  return Matrix::Identity(d, d);
}

double adapt_scale(double scale, double acceptance_rate, const MhConfig& cfg) {
  if (!cfg.adapt) return scale;
  const double rate = std::clamp(acceptance_rate, 0.0, 1.0);
  return std::max(kMinProposalScale,
                  scale * std::exp(rate - cfg.target_acceptance));
}

}  // namespace mmnl
