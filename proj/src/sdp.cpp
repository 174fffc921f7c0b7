#include "sipsdp/sdp.hpp"

namespace sipsdp {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::inaccurate: return "inaccurate";
    case SolveStatus::failed: return "failed";
  }
  return "failed";
}

SdpSettings SdpSettings::from_map(const std::map<std::string, double>& kv) {
  SdpSettings s;
  for (const auto& [key, val] : kv) {
    if (key == "feas_tol") s.feas_tol = val;
    else if (key == "gap_tol") s.gap_tol = val;
    else if (key == "max_iter") s.max_iter = static_cast<int>(val);
    else if (key == "ray_tol") s.ray_tol = val;
    else if (key == "step_scale") s.step_scale = val;
    else if (key == "init_scale") s.init_scale = val;
    else if (key == "verbose") s.verbose = static_cast<int>(val);
    else throw Error("unknown solver setting: " + key);
  }
  return s;
}

int SdpProblem::add_psd_block(const std::string& name, int dim) {
  if (dim <= 0) throw DimensionError("psd block dimension must be positive");
  blocks_.emplace_back(name, dim);
  return num_blocks() - 1;
}

int SdpProblem::add_free_var(const std::string& name) {
  free_names_.push_back(name);
  return num_free() - 1;
}

int SdpProblem::add_nonneg_var(const std::string& name) {
  nonneg_names_.push_back(name);
  return num_nonneg() - 1;
}

int SdpProblem::add_equality(double rhs) {
  rows_.emplace_back();
  rows_.back().rhs = rhs;
  return num_equalities() - 1;
}

SdpProblem::Row& SdpProblem::row_ref(int eq) {
  if (eq < 0 || eq >= num_equalities()) throw DimensionError("equality index out of range");
  return rows_[static_cast<size_t>(eq)];
}

void SdpProblem::check_entry(int block, int i, int j) const {
  if (block < 0 || block >= num_blocks()) throw DimensionError("block index out of range");
  int d = block_dim(block);
  if (i < 0 || j < i || j >= d)
    throw DimensionError("block entry must satisfy 0 <= i <= j < dim");
}

void SdpProblem::add_entry_coeff(int eq, int block, int i, int j, double coeff) {
  check_entry(block, i, j);
  row_ref(eq).mat.push_back({block, i, j, coeff});
}

void SdpProblem::add_free_coeff(int eq, int var, double coeff) {
  if (var < 0 || var >= num_free()) throw DimensionError("free variable index out of range");
  row_ref(eq).free_terms.push_back({var, coeff});
}

void SdpProblem::add_nonneg_coeff(int eq, int var, double coeff) {
  if (var < 0 || var >= num_nonneg()) throw DimensionError("nonneg variable index out of range");
  row_ref(eq).nonneg_terms.push_back({var, coeff});
}

void SdpProblem::add_objective_entry(int block, int i, int j, double coeff) {
  check_entry(block, i, j);
  objective_.mat.push_back({block, i, j, coeff});
}

void SdpProblem::add_objective_free(int var, double coeff) {
  if (var < 0 || var >= num_free()) throw DimensionError("free variable index out of range");
  objective_.free_terms.push_back({var, coeff});
}

void SdpProblem::add_objective_nonneg(int var, double coeff) {
  if (var < 0 || var >= num_nonneg()) throw DimensionError("nonneg variable index out of range");
  objective_.nonneg_terms.push_back({var, coeff});
}

void SdpProblem::validate() const {
  auto check_row = [&](const Row& r) {
    for (const auto& e : r.mat) check_entry(e.block, e.i, e.j);
    for (const auto& e : r.free_terms)
      if (e.index < 0 || e.index >= num_free()) throw DimensionError("bad free index");
    for (const auto& e : r.nonneg_terms)
      if (e.index < 0 || e.index >= num_nonneg()) throw DimensionError("bad nonneg index");
  };
  for (const auto& r : rows_) check_row(r);
  check_row(objective_);
}

}  // namespace sipsdp
