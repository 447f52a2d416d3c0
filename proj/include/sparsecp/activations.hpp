#pragma once

// Softmax, sparsemax and the gamma-entmax family, with temperature scaling.
//
// gamma-entmax(z) = argmax_{p in simplex} p.z + H_gamma(p), where H_gamma is
// the Tsallis entropy. The solution is p_j = [(gamma-1) z_j - tau]_+^(1/(gamma-1))
// for a unique normalizing threshold tau. gamma = 1 is softmax (dense),
// gamma = 2 is sparsemax (Euclidean projection onto the simplex).

#include <cstddef>
#include <span>
#include <vector>

namespace sparsecp {

// Raw label scores of one instance. At least two classes, all entries finite.
class LogitVector {
 public:
  explicit LogitVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const LogitVector&) const = default;

 private:
  std::vector<double> values_;
};

struct SparseDistribution {
  std::vector<double> probs;
  std::vector<std::size_t> support;  // ascending label indices
  double tau = 0.0;
  double gamma = 1.0;
};

struct EntmaxConfig {
  double gamma = 1.5;
  double bisect_tol = 1e-9;
  int max_iters = 100;
};

// Indices of `values` sorted by descending value; ties keep the lower index
// first. This is the single ordering used everywhere a rank is needed.
std::vector<std::size_t> descending_order(std::span<const double> values);

// beta * z. beta = 0 is allowed and yields the zero vector.
LogitVector scale(const LogitVector& z, double beta);

SparseDistribution softmax(const LogitVector& z);

// Sort-and-threshold evaluation of the simplex projection.
SparseDistribution sparsemax(const LogitVector& z);

// Dispatches to softmax at gamma = 1 and to sparsemax at gamma = 2; otherwise
// finds tau by bisection on the normalization equation.
SparseDistribution entmax(const LogitVector& z, const EntmaxConfig& cfg);

// Tsallis entropy H_gamma(p); Shannon entropy when gamma is 1.
double tsallis_entropy(std::span<const double> p, double gamma);

// p.z + H_gamma(p), the objective that entmax maximizes over the simplex.
double entmax_objective(std::span<const double> p, const LogitVector& z,
                        double gamma);

}  // namespace sparsecp
