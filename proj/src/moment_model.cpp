#include "sipsdp/moment_model.hpp"

#include <map>

namespace sipsdp {

void MomentLayout::add_term(SdpProblem& sdp, int row, const Monomial& mono,
                            double coeff) const {
  const Slot& s = slots[static_cast<size_t>(index.index_of(mono))];
  if (s.i >= 0) {
    if (row < 0) sdp.add_objective_entry(block, s.i, s.j, coeff);
    else sdp.add_entry_coeff(row, block, s.i, s.j, coeff);
  } else {
    if (row < 0) sdp.add_objective_free(s.free_var, coeff);
    else sdp.add_free_coeff(row, s.free_var, coeff);
  }
}

double MomentLayout::value(const SolveReport& rep, const Monomial& mono) const {
  const Slot& s = slots[static_cast<size_t>(index.index_of(mono))];
  if (s.i >= 0) return rep.block_values[static_cast<size_t>(block)](s.i, s.j);
  return rep.free_values[static_cast<size_t>(s.free_var)];
}

MomentVector MomentLayout::moments(const SolveReport& rep) const {
  MomentVector mv(n, max_degree / 2);
  MonomialIndex trunc(n, 2 * (max_degree / 2));
  for (int i = 0; i < trunc.size(); ++i) mv.values[i] = value(rep, trunc.at(i));
  return mv;
}

MomentLayout make_moment_layout(SdpProblem& sdp, int n, int max_degree,
                                const std::string& name) {
  MomentLayout L;
  L.n = n;
  L.max_degree = max_degree;
  L.index = MonomialIndex(n, max_degree);
  int kblk = max_degree / 2;
  L.basis = monomial_basis(n, kblk);
  const int N = static_cast<int>(L.basis.size());
  L.block = sdp.add_psd_block(name, N);
  L.slots.resize(static_cast<size_t>(L.index.size()));

  // first pair defining each product becomes the representative entry;
  // every further pair is tied to it by an equality
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      Monomial prod = L.basis[static_cast<size_t>(i)] * L.basis[static_cast<size_t>(j)];
      MomentLayout::Slot& s = L.slots[static_cast<size_t>(L.index.index_of(prod))];
      if (s.i < 0) {
        s.i = i;
        s.j = j;
      } else {
        int eq = sdp.add_equality(0.0);
        sdp.add_entry_coeff(eq, L.block, i, j, 1.0);
        sdp.add_entry_coeff(eq, L.block, s.i, s.j, -1.0);
      }
    }
  for (int k = 0; k < L.index.size(); ++k) {
    MomentLayout::Slot& s = L.slots[static_cast<size_t>(k)];
    if (s.i < 0 && s.free_var < 0)
      s.free_var = sdp.add_free_var(name + "_m" + std::to_string(k));
  }
  return L;
}

std::vector<int> add_localizing_blocks(SdpProblem& sdp, const MomentLayout& layout,
                                       const std::vector<Polynomial>& generators, int t,
                                       const std::string& name) {
  std::vector<int> blocks;
  for (size_t j = 0; j < generators.size(); ++j) {
    const Polynomial& g = generators[j];
    if (g.space().size() != layout.n)
      throw DimensionError("localizing generator has wrong variable count");
    int dj = (g.degree() + 1) / 2;
    if (t - dj < 0) throw PreconditionError("order too small for localizing block");
    if (2 * (t - dj) + g.degree() > layout.max_degree)
      throw PreconditionError("moment layout too short for localizing block");
    auto basis = monomial_basis(layout.n, t - dj);
    const int N = static_cast<int>(basis.size());
    int blk = sdp.add_psd_block(name + std::to_string(j + 1), N);
    blocks.push_back(blk);
    for (int a = 0; a < N; ++a)
      for (int b = a; b < N; ++b) {
        int eq = sdp.add_equality(0.0);
        sdp.add_entry_coeff(eq, blk, a, b, 1.0);
        Monomial ab = basis[static_cast<size_t>(a)] * basis[static_cast<size_t>(b)];
        for (const auto& [gm, gc] : g.terms()) layout.add_term(sdp, eq, ab * gm, -gc);
      }
  }
  return blocks;
}

}  // namespace sipsdp
