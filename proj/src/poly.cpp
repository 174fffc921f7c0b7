#include "sipsdp/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sipsdp {

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw DimensionError("monomial exponents must be nonnegative");
  }
}

Monomial Monomial::constant(int nvars) {
  return Monomial(std::vector<int>(static_cast<size_t>(nvars), 0));
}

Monomial Monomial::unit(int nvars, int var, int power) {
  std::vector<int> e(static_cast<size_t>(nvars), 0);
  e[static_cast<size_t>(var)] = power;
  return Monomial(std::move(e));
}

int Monomial::degree() const {
  int d = 0;
  for (int e : exps_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (exps_.size() != other.exps_.size())
    throw DimensionError("monomial size mismatch");
  std::vector<int> e(exps_);
  for (size_t i = 0; i < e.size(); ++i) e[i] += other.exps_[i];
  return Monomial(std::move(e));
}

bool Monomial::try_divide(const Monomial& divisor, Monomial& out) const {
  if (exps_.size() != divisor.exps_.size())
    throw DimensionError("monomial size mismatch");
  std::vector<int> e(exps_);
  for (size_t i = 0; i < e.size(); ++i) {
    e[i] -= divisor.exps_[i];
    if (e[i] < 0) return false;
  }
  out = Monomial(std::move(e));
  return true;
}

bool Monomial::operator<(const Monomial& o) const {
  if (exps_.size() != o.exps_.size())
    throw DimensionError("monomial size mismatch");
  int da = degree(), db = o.degree();
  if (da != db) return da < db;
  // within a degree, a monomial with more weight on earlier variables
  // comes first: 1, x1, x2, x1^2, x1 x2, x2^2, ...
  for (size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] != o.exps_[i]) return exps_[i] > o.exps_[i];
  }
  return false;
}

std::string Monomial::str(const std::vector<std::string>& names) const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] == 0) continue;
    if (!first) os << "*";
    os << names[i];
    if (exps_[i] > 1) os << "^" << exps_[i];
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

namespace {
void enumerate_monomials(int n, int max_deg, std::vector<Monomial>& out) {
  std::vector<int> cur(static_cast<size_t>(n), 0);
  // recursive enumeration then sort; basis sizes here are small
  std::vector<std::vector<int>> all;
  std::vector<int> stack;
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n) {
      all.push_back(cur);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur[static_cast<size_t>(pos)] = e;
      self(self, pos + 1, remaining - e);
    }
    cur[static_cast<size_t>(pos)] = 0;
  };
  rec(rec, 0, max_deg);
  out.reserve(all.size());
  for (auto& v : all) out.emplace_back(std::move(v));
  std::sort(out.begin(), out.end());
}
}  // namespace

std::vector<Monomial> monomial_basis(int n, int k) {
  if (n < 1) throw DimensionError("monomial_basis: need n >= 1");
  if (k < 0) throw DimensionError("monomial_basis: need k >= 0");
  std::vector<Monomial> out;
  enumerate_monomials(n, k, out);
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

double multinomial(const Monomial& m) {
  double r = 1.0;
  int total = 0;
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 1; j <= m[i]; ++j) {
      ++total;
      r *= static_cast<double>(total) / static_cast<double>(j);
    }
  }
  return r;
}

VarSpace::VarSpace(std::vector<std::string> x_names, std::vector<std::string> y_names)
    : x_names_(std::move(x_names)), y_names_(std::move(y_names)) {
  std::vector<std::string> all(x_names_);
  all.insert(all.end(), y_names_.begin(), y_names_.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw DimensionError("variable names must be unique");
}

const std::string& VarSpace::name(int i) const {
  if (i < nx()) return x_names_[static_cast<size_t>(i)];
  return y_names_[static_cast<size_t>(i - nx())];
}

int VarSpace::var_index(VarBlock b, int i) const {
  if (i < 0 || i >= block_size(b)) throw DimensionError("block variable index out of range");
  return b == VarBlock::X ? i : nx() + i;
}

bool VarSpace::operator==(const VarSpace& o) const {
  return x_names_ == o.x_names_ && y_names_ == o.y_names_;
}

Polynomial Polynomial::constant(const VarSpace& s, double c) {
  Polynomial p(s);
  p.add_term(Monomial::constant(s.size()), c);
  return p;
}

Polynomial Polynomial::variable(const VarSpace& s, int var_index) {
  if (var_index < 0 || var_index >= s.size())
    throw DimensionError("variable index out of range");
  Polynomial p(s);
  p.add_term(Monomial::unit(s.size(), var_index), 1.0);
  return p;
}

Polynomial Polynomial::variable(const VarSpace& s, VarBlock b, int i) {
  return variable(s, s.var_index(b, i));
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (m.size() != space_.size())
    throw DimensionError("monomial does not match variable space");
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (std::abs(c) >= kCoeffDropTol) terms_.emplace(m, c);
  } else {
    it->second += c;
    if (std::abs(it->second) < kCoeffDropTol) terms_.erase(it);
  }
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (space_ != o.space_) throw DimensionError("polynomial space mismatch");
  Polynomial r(*this);
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  if (space_ != o.space_) throw DimensionError("polynomial space mismatch");
  Polynomial r(*this);
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (space_ != o.space_) throw DimensionError("polynomial space mismatch");
  Polynomial r(space_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Polynomial Polynomial::operator*(double c) const {
  Polynomial r(space_);
  for (const auto& [m, v] : terms_) r.add_term(m, v * c);
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw DimensionError("negative power");
  Polynomial r = Polynomial::constant(space_, 1.0);
  for (int i = 0; i < e; ++i) r = r * (*this);
  return r;
}

double Polynomial::evaluate(const std::vector<double>& point) const {
  if (static_cast<int>(point.size()) != space_.size())
    throw DimensionError("evaluation point has wrong dimension");
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (int i = 0; i < m.size(); ++i) {
      for (int j = 0; j < m[i]; ++j) t *= point[static_cast<size_t>(i)];
    }
    total += t;
  }
  return total;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

int Polynomial::block_degree_of(const Monomial& m, VarBlock b) const {
  int lo = b == VarBlock::X ? 0 : space_.nx();
  int hi = b == VarBlock::X ? space_.nx() : space_.size();
  int d = 0;
  for (int i = lo; i < hi; ++i) d += m[i];
  return d;
}

int Polynomial::block_degree(VarBlock b) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, block_degree_of(m, b));
  return d;
}

Polynomial Polynomial::homogenize_block(VarBlock b) const {
  if (b != VarBlock::Y)
    throw PreconditionError("homogenization is defined for the Y block");
  if (space_.ny() == 0) throw PreconditionError("Y block is empty");
  std::string h = "y0";
  auto taken = [&](const std::string& n) {
    for (int i = 0; i < space_.size(); ++i)
      if (space_.name(i) == n) return true;
    return false;
  };
  while (taken(h)) h += "_";
  std::vector<std::string> ynames;
  ynames.push_back(h);
  ynames.insert(ynames.end(), space_.y_names().begin(), space_.y_names().end());
  VarSpace ext(space_.x_names(), ynames);

  int deg = block_degree(VarBlock::Y);
  int nx = space_.nx();
  Polynomial r(ext);
  for (const auto& [m, c] : terms_) {
    std::vector<int> e(static_cast<size_t>(ext.size()), 0);
    for (int i = 0; i < nx; ++i) e[static_cast<size_t>(i)] = m[i];
    int ydeg = block_degree_of(m, VarBlock::Y);
    e[static_cast<size_t>(nx)] = deg - ydeg;
    for (int i = nx; i < space_.size(); ++i) e[static_cast<size_t>(i + 1)] = m[i];
    r.add_term(Monomial(std::move(e)), c);
  }
  return r;
}

Polynomial Polynomial::highest_degree_form(VarBlock b) const {
  int deg = block_degree(b);
  Polynomial r(space_);
  for (const auto& [m, c] : terms_) {
    if (block_degree_of(m, b) == deg) r.add_term(m, c);
  }
  return r;
}

double Polynomial::coefficient_norm() const {
  if (block_degree(VarBlock::X) > 0)
    throw PreconditionError("coefficient norm is defined for Y-block polynomials");
  double best = 0.0;
  for (const auto& [m, c] : terms_) {
    best = std::max(best, std::abs(c) / multinomial(m));
  }
  return best;
}

Polynomial Polynomial::derivative(int var_index) const {
  if (var_index < 0 || var_index >= space_.size())
    throw DimensionError("variable index out of range");
  Polynomial r(space_);
  for (const auto& [m, c] : terms_) {
    int e = m[var_index];
    if (e == 0) continue;
    std::vector<int> ex = m.exponents();
    ex[static_cast<size_t>(var_index)] = e - 1;
    r.add_term(Monomial(std::move(ex)), c * e);
  }
  return r;
}

Polynomial Polynomial::substitute(int var_index, const Polynomial& value) const {
  if (value.space() != space_) throw DimensionError("substitution space mismatch");
  Polynomial r(space_);
  for (const auto& [m, c] : terms_) {
    std::vector<int> ex = m.exponents();
    int e = ex[static_cast<size_t>(var_index)];
    ex[static_cast<size_t>(var_index)] = 0;
    Polynomial t(space_);
    t.add_term(Monomial(std::move(ex)), c);
    r = r + t * value.pow(e);
  }
  return r;
}

Polynomial Polynomial::substitute_value(int var_index, double v) const {
  Polynomial r(space_);
  for (const auto& [m, c] : terms_) {
    std::vector<int> ex = m.exponents();
    int e = ex[static_cast<size_t>(var_index)];
    ex[static_cast<size_t>(var_index)] = 0;
    double scale = 1.0;
    for (int j = 0; j < e; ++j) scale *= v;
    r.add_term(Monomial(std::move(ex)), c * scale);
  }
  return r;
}

Polynomial Polynomial::scale_variable(int var_index, double factor) const {
  Polynomial r(space_);
  for (const auto& [m, c] : terms_) {
    double scale = 1.0;
    for (int j = 0; j < m[var_index]; ++j) scale *= factor;
    r.add_term(m, c * scale);
  }
  return r;
}

Polynomial Polynomial::drop_variable(int var_index) const {
  std::vector<std::string> xs, ys;
  for (int i = 0; i < space_.nx(); ++i)
    if (i != var_index) xs.push_back(space_.x_names()[static_cast<size_t>(i)]);
  for (int i = space_.nx(); i < space_.size(); ++i)
    if (i != var_index) ys.push_back(space_.y_names()[static_cast<size_t>(i - space_.nx())]);
  VarSpace ns(xs, ys);
  Polynomial r(ns);
  for (const auto& [m, c] : terms_) {
    if (m[var_index] != 0)
      throw PreconditionError("drop_variable: variable still occurs");
    std::vector<int> ex;
    ex.reserve(static_cast<size_t>(ns.size()));
    for (int i = 0; i < space_.size(); ++i)
      if (i != var_index) ex.push_back(m[i]);
    r.add_term(Monomial(std::move(ex)), c);
  }
  return r;
}

double Polynomial::max_abs_coeff() const {
  double best = 0.0;
  for (const auto& [m, c] : terms_) best = std::max(best, std::abs(c));
  return best;
}

bool Polynomial::almost_equal(const Polynomial& o, double tol) const {
  if (space_ != o.space_) return false;
  for (const auto& [m, c] : terms_)
    if (std::abs(c - o.coeff(m)) > tol) return false;
  for (const auto& [m, c] : o.terms_)
    if (std::abs(c - coeff(m)) > tol) return false;
  return true;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::vector<std::string> names;
  for (int i = 0; i < space_.size(); ++i) names.push_back(space_.name(i));
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c >= 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    os << std::abs(c);
    if (m.degree() > 0) os << "*" << m.str(names);
    first = false;
  }
  return os.str();
}

Polynomial perturbation_polynomial(const VarSpace& s, int r, double tau_K) {
  if (r < 1) throw PreconditionError("perturbation order must be >= 1");
  if (!(tau_K > 0)) throw PreconditionError("tau_K must be positive");
  Polynomial p(s);
  double w = std::pow(1.0 / tau_K, 2 * r);
  for (int i = 0; i < s.nx(); ++i) {
    p.add_term(Monomial::unit(s.size(), s.var_index(VarBlock::X, i), 2 * r), w);
  }
  return p;
}

}  // namespace sipsdp
