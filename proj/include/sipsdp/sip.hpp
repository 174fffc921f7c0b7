#ifndef SIPSDP_SIP_HPP
#define SIPSDP_SIP_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "sipsdp/poly.hpp"

namespace sipsdp {

// A convex semi-infinite instance: minimize f over
//   K = { x : p(x, y) >= 0 for all y in S },  S = { y : g_j(y) >= 0 }.
// f and p share one VarSpace; the index generators live on its Y block.
struct SipProblem {
  Polynomial f;
  Polynomial p;
  std::vector<Polynomial> generators;
  double tau_K = std::numeric_limits<double>::quiet_NaN();

  bool has_tau() const { return std::isfinite(tau_K); }
  const VarSpace& space() const { return p.space(); }
  VarSpace index_space() const { return VarSpace({}, space().y_names()); }
  int m() const { return space().nx(); }
  int n() const { return space().ny(); }

  // degrees are recomputed on demand, never cached
  int d_x() const { return p.block_degree(VarBlock::X); }
  int d_y() const { return p.block_degree(VarBlock::Y); }
  int d_S() const {
    int d = 1;
    for (const auto& g : generators) d = std::max(d, (g.degree() + 1) / 2);
    return d;
  }
  int d_K() const { return std::max((d_y() + 1) / 2, d_S()); }
  int d_P() const { return std::max(f.degree(), d_x()); }

  void validate() const {
    if (space().nx() < 1 || space().ny() < 1)
      throw PreconditionError("instance needs at least one decision and one index variable");
    if (f.space() != space()) throw DimensionError("objective space mismatch");
    if (f.block_degree(VarBlock::Y) > 0)
      throw PreconditionError("objective must not involve index variables");
    VarSpace ys({}, space().y_names());
    for (const auto& g : generators)
      if (g.space() != ys) throw DimensionError("index generator space mismatch");
    if (has_tau() && !(tau_K > 0)) throw PreconditionError("tau_K must be positive");
  }
};

}  // namespace sipsdp

#endif
