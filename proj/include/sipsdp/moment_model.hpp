#ifndef SIPSDP_MOMENT_MODEL_HPP
#define SIPSDP_MOMENT_MODEL_HPP

#include <string>
#include <vector>

#include "sipsdp/moments.hpp"
#include "sipsdp/sdp.hpp"

namespace sipsdp {

// A truncated linear functional realized inside an SdpProblem: monomials of
// degree <= 2k live as entries of a psd moment-matrix block (with Hankel tie
// equalities added on construction), monomials above 2k as free scalars.
struct MomentLayout {
  int n = 0;
  int max_degree = 0;
  int block = -1;
  MonomialIndex index;             // monomials up to max_degree
  std::vector<Monomial> basis;     // moment matrix row basis
  struct Slot {
    int i = -1, j = -1;  // block entry when i >= 0
    int free_var = -1;   // otherwise a free scalar
  };
  std::vector<Slot> slots;

  // add coeff * L(monomial) to an equality row (or the objective, row = -1)
  void add_term(SdpProblem& sdp, int row, const Monomial& mono, double coeff) const;
  // value of L(monomial) in a solved report
  double value(const SolveReport& rep, const Monomial& mono) const;
  // the functional truncated to order floor(max_degree / 2)
  MomentVector moments(const SolveReport& rep) const;
};

MomentLayout make_moment_layout(SdpProblem& sdp, int n, int max_degree,
                                const std::string& name);

// Localizing psd blocks tied entrywise to the layout; one block per
// generator, sized by the basis of degree t - ceil(deg g / 2).
std::vector<int> add_localizing_blocks(SdpProblem& sdp, const MomentLayout& layout,
                                       const std::vector<Polynomial>& generators, int t,
                                       const std::string& name);

}  // namespace sipsdp

#endif
