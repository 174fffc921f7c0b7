#ifndef SIPSDP_POLY_HPP
#define SIPSDP_POLY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sipsdp/errors.hpp"

namespace sipsdp {

// Coefficients below this magnitude are dropped after arithmetic.
inline constexpr double kCoeffDropTol = 1e-14;

enum class VarBlock { X, Y };

// Exponent vector over a fixed variable list.  Ordering is graded
// lexicographic: lower total degree first, ties broken so that earlier
// variables dominate (1 < x1 < x2 < x1^2 < x1*x2 < x2^2 < ...).  This is the
// canonical basis order everywhere in the library.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);
  static Monomial constant(int nvars);
  static Monomial unit(int nvars, int var, int power = 1);

  int size() const { return static_cast<int>(exps_.size()); }
  int degree() const;
  int operator[](int i) const { return exps_[static_cast<size_t>(i)]; }
  const std::vector<int>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;
  // componentwise difference; returns false if any exponent would go negative
  bool try_divide(const Monomial& divisor, Monomial& out) const;

  bool operator==(const Monomial& o) const { return exps_ == o.exps_; }
  bool operator!=(const Monomial& o) const { return exps_ != o.exps_; }
  bool operator<(const Monomial& o) const;

  std::string str(const std::vector<std::string>& names) const;

 private:
  std::vector<int> exps_;
};

// All monomials of degree <= k in n variables, in graded lex order.
// Length is binom(n+k, k).
std::vector<Monomial> monomial_basis(int n, int k);

std::uint64_t binomial(int n, int k);

// |alpha|! / (alpha_1! ... alpha_n!)
double multinomial(const Monomial& m);

// Ordered variable list split into an X block followed by a Y block.
// Either block may be empty.
class VarSpace {
 public:
  VarSpace() = default;
  VarSpace(std::vector<std::string> x_names, std::vector<std::string> y_names);

  int nx() const { return static_cast<int>(x_names_.size()); }
  int ny() const { return static_cast<int>(y_names_.size()); }
  int size() const { return nx() + ny(); }
  const std::vector<std::string>& x_names() const { return x_names_; }
  const std::vector<std::string>& y_names() const { return y_names_; }
  const std::string& name(int i) const;
  // absolute index of the i-th variable of a block
  int var_index(VarBlock b, int i) const;
  int block_size(VarBlock b) const { return b == VarBlock::X ? nx() : ny(); }

  bool operator==(const VarSpace& o) const;
  bool operator!=(const VarSpace& o) const { return !(*this == o); }

 private:
  std::vector<std::string> x_names_, y_names_;
};

// Sparse multivariate polynomial with double coefficients over a VarSpace.
// Immutable value semantics: arithmetic returns new polynomials, terms are
// kept in graded lex order and zero coefficients are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(VarSpace space) : space_(std::move(space)) {}
  static Polynomial constant(const VarSpace& s, double c);
  static Polynomial variable(const VarSpace& s, int var_index);
  static Polynomial variable(const VarSpace& s, VarBlock b, int i);

  const VarSpace& space() const { return space_; }
  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int num_terms() const { return static_cast<int>(terms_.size()); }

  void add_term(const Monomial& m, double c);
  double coeff(const Monomial& m) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double c) const;
  Polynomial operator-() const { return *this * -1.0; }
  Polynomial pow(int e) const;

  double evaluate(const std::vector<double>& point) const;

  int degree() const;                    // total degree, 0 for the zero poly
  int block_degree(VarBlock b) const;    // max block degree, 0 for zero poly
  int block_degree_of(const Monomial& m, VarBlock b) const;

  // y0^{deg_Y(p)} p(x, y/y0); y0 becomes the first variable of the Y block
  Polynomial homogenize_block(VarBlock b) const;
  // sum of the terms of maximal degree in the given block
  Polynomial highest_degree_form(VarBlock b) const;

  // max_alpha |c_alpha| / multinomial(|alpha|, alpha); requires an empty
  // X block (the norm is defined for index polynomials)
  double coefficient_norm() const;

  Polynomial derivative(int var_index) const;
  // substitute a polynomial over the same space for one variable
  Polynomial substitute(int var_index, const Polynomial& value) const;
  // fix one variable to a number (the variable stays in the space)
  Polynomial substitute_value(int var_index, double value) const;
  // x_i -> factor * x_i
  Polynomial scale_variable(int var_index, double factor) const;
  // remove a variable that no term uses
  Polynomial drop_variable(int var_index) const;

  double max_abs_coeff() const;
  bool almost_equal(const Polynomial& o, double tol = 1e-9) const;
  std::string str() const;

 private:
  VarSpace space_;
  std::map<Monomial, double> terms_;
};

// Theta_r(x) = sum_i (x_i / tau_K)^{2r} over the X block of the space
Polynomial perturbation_polynomial(const VarSpace& s, int r, double tau_K);

}  // namespace sipsdp

#endif
