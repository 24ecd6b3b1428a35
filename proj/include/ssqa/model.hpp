#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ssqa {

using BitVector = std::vector<uint8_t>;   // entries 0/1
using SpinVector = std::vector<int8_t>;   // entries -1/+1

SpinVector bits_to_spins(const BitVector& x);
BitVector spins_to_bits(const SpinVector& s);

// Quadratic binary model E(x) = sum_{i<=j} Q_ij x_i x_j + constant.
// Coefficients are stored upper-triangular; the diagonal holds the linear
// terms (x^2 == x).  The constant carries additive terms produced by
// penalty expansions so that "energy 0" stays meaningful after conversion.
class QuboModel {
 public:
  explicit QuboModel(int n, double constant = 0.0);

  int n() const { return n_; }
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }

  // (i, j) is an unordered index pair; accessors normalize the order.
  double coeff(int i, int j) const;
  void set_coeff(int i, int j, double value);
  void add_coeff(int i, int j, double value);

 private:
  size_t at(int i, int j) const;

  int n_;
  double constant_;
  std::vector<double> q_;  // dense n*n, upper triangle used
};

double qubo_energy(const QuboModel& q, const BitVector& x);

// Ising model H(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i + offset.
// J is kept dense and mirrored so row i can be handed to kernels directly.
class IsingModel {
 public:
  explicit IsingModel(int n, double offset = 0.0);

  int n() const { return n_; }
  double offset() const { return offset_; }
  void set_offset(double v) { offset_ = v; }

  double bias(int i) const;
  void set_bias(int i, double value);

  double coupling(int i, int j) const;       // i != j
  void set_coupling(int i, int j, double value);

  const std::vector<double>& biases() const { return h_; }
  const double* coupling_row(int i) const { return j_.data() + size_t(i) * n_; }

 private:
  int n_;
  double offset_;
  std::vector<double> h_;
  std::vector<double> j_;  // dense n*n, symmetric, zero diagonal
};

double ising_energy(const IsingModel& m, const SpinVector& s);

// Energy change for flipping spin i: 2 s_i (h_i + sum_j J_ij s_j).
double ising_flip_delta(const IsingModel& m, const SpinVector& s, int i);

IsingModel qubo_to_ising(const QuboModel& q);

// Text model files.  Grammar (0-based indices, '#' starts a comment line):
//   qubo <n> [constant]          ising <n> <offset>
//   i j value   (i <= j)         i j value   (i < j, couplings)
//   ...                          bias
//                                i i value
using AnyModel = std::variant<QuboModel, IsingModel>;

AnyModel load_model(const std::string& path);
void save_qubo(const QuboModel& q, const std::string& path);
void save_ising(const IsingModel& m, const std::string& path);

}  // namespace ssqa
