// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mmnl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// J x d covariates of one choice situation; row j holds x_j.
class CovariateMatrix {
 public:
  explicit CovariateMatrix(RowMatrix values);

  // Alternative-major flattening: (x_11, .., x_1d, x_21, ..).
  static CovariateMatrix from_flat(std::span<const double> flat,
                                   std::size_t alternatives, std::size_t dim);

  std::size_t alternatives() const {
    return static_cast<std::size_t>(values_.rows());
  }
  std::size_t dim() const { return static_cast<std::size_t>(values_.cols()); }
  const RowMatrix& values() const { return values_; }
  double utility(std::size_t j, const double* beta) const;
  double utility(std::size_t j, const Vector& beta) const {
    return utility(j, beta.data());
  }

 private:
  RowMatrix values_;
};

// A single choice. `choice` is 1-based at construction and exposed both ways.
class Observation {
 public:
  Observation(int id, int choice, CovariateMatrix x);

  int id() const { return id_; }
  int choice() const { return static_cast<int>(chosen_) + 1; }
  std::size_t chosen() const { return chosen_; }
  const CovariateMatrix& x() const { return x_; }

 private:
  int id_;
  std::size_t chosen_;
  CovariateMatrix x_;
};

class PanelObservation {
 public:
  PanelObservation(int id, std::vector<int> choices,
                   std::vector<CovariateMatrix> x);

  int id() const { return id_; }
  std::size_t periods() const { return chosen_.size(); }
  // 1-based choice in period t (0-based t).
  int choice(std::size_t t) const { return static_cast<int>(chosen_[t]) + 1; }
  std::size_t chosen(std::size_t t) const { return chosen_[t]; }
  const CovariateMatrix& x(std::size_t t) const { return x_[t]; }

 private:
  int id_;
  std::vector<std::size_t> chosen_;
  std::vector<CovariateMatrix> x_;
};

class ChoiceDataset {
 public:
  ChoiceDataset(std::size_t alternatives, std::size_t dim);

  void add(Observation obs);
  std::size_t alternatives() const { return J_; }
  std::size_t dim() const { return d_; }
  std::size_t size() const { return obs_.size(); }
  bool empty() const { return obs_.empty(); }
  const Observation& operator[](std::size_t i) const { return obs_[i]; }
  const std::vector<Observation>& observations() const { return obs_; }

 private:
  std::size_t J_;
  std::size_t d_;
  std::vector<Observation> obs_;
};

class PanelDataset {
 public:
  PanelDataset(std::size_t alternatives, std::size_t dim);

  void add(PanelObservation obs);
  std::size_t alternatives() const { return J_; }
  std::size_t dim() const { return d_; }
  std::size_t size() const { return obs_.size(); }
  bool empty() const { return obs_.empty(); }
  const PanelObservation& operator[](std::size_t i) const { return obs_[i]; }
  const std::vector<PanelObservation>& observations() const { return obs_; }

  // Every observation becomes a one-period panel.
  static PanelDataset from_choices(const ChoiceDataset& data);

 private:
  std::size_t J_;
  std::size_t d_;
  std::vector<PanelObservation> obs_;
};

// A probability vector on {1..J}.  Construction accepts a sum within 1e-9
// of one and renormalizes, so stored values sum to 1 within rounding.
class Simplex {
 public:
  explicit Simplex(Vector probabilities);

  std::size_t size() const {
    return static_cast<std::size_t>(probs_.size());
  }
  double operator[](std::size_t j) const {
    return probs_[static_cast<Eigen::Index>(j)];
  }
  const Vector& values() const { return probs_; }

 private:
  Vector probs_;
};

// G = sum_k p_k delta_{Z_k}.
class MixingDistribution {
 public:
  MixingDistribution(std::vector<double> weights, std::vector<Vector> atoms);

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vector>& atoms() const { return atoms_; }

 private:
  std::vector<double> weights_;
  std::vector<Vector> atoms_;
};

// log of the logit probability of alternative `alt` (0-based).
double log_mnl_prob(const CovariateMatrix& x, const Vector& beta,
                    std::size_t alt);

// Logit probabilities written into `out` (resized to J); no validation
// beyond finiteness.  Hot-path variant of mnl_prob.
void mnl_prob_into(const CovariateMatrix& x, const Vector& beta, Vector& out);

// Raw variant: beta has x.dim() entries, out has x.alternatives() slots.
void mnl_prob_raw(const CovariateMatrix& x, const double* beta, double* out);

Simplex mnl_prob(const CovariateMatrix& x, const Vector& beta);

Simplex mixture_choice_prob(const CovariateMatrix& x,
                            const MixingDistribution& G);

double log_likelihood(const Observation& obs, const Vector& beta);

double panel_log_likelihood(const PanelObservation& obs, const Vector& beta);

}  // namespace mmnl
