#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "sipsdp/sdp.hpp"

namespace sipsdp {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// entry of F_matno destined for the file, grouped and ordered canonically
struct FileEntry {
  int matno, blkno, i, j;  // 1-based block and indices
  double value;
  bool operator<(const FileEntry& o) const {
    if (matno != o.matno) return matno < o.matno;
    if (blkno != o.blkno) return blkno < o.blkno;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
};

}  // namespace

// The file encodes the equality standard form directly:
//   min <F_0, Y>  s.t.  <F_k, Y> = c_k,  Y block-diagonal PSD,
// with negative block sizes marking diagonal blocks.  Nonnegative scalars
// map to diagonal entries and each free scalar is split into a difference
// of two diagonal entries, so solve values are preserved exactly.
std::string sdpa_text(const SdpProblem& prob) {
  prob.validate();
  const int B = prob.num_blocks();
  const int p = prob.num_nonneg();
  const int q = prob.num_free();
  const int K = prob.num_equalities();
  const int diag_dim = p + 2 * q;
  const int nblocks = B + (diag_dim > 0 ? 1 : 0);
  const double osign = prob.sense() == SdpProblem::Sense::maximize ? -1.0 : 1.0;

  std::map<std::tuple<int, int, int, int>, double> acc;
  auto put = [&](int matno, int blkno, int i, int j, double val) {
    if (val == 0.0) return;
    acc[{matno, blkno, i, j}] += val;
  };
  auto emit_row = [&](int matno, const SdpProblem::Row& r, double scale) {
    for (const auto& e : r.mat) put(matno, e.block + 1, e.i + 1, e.j + 1, scale * e.coeff);
    for (const auto& e : r.nonneg_terms)
      put(matno, B + 1, e.index + 1, e.index + 1, scale * e.coeff);
    for (const auto& e : r.free_terms) {
      put(matno, B + 1, p + 2 * e.index + 1, p + 2 * e.index + 1, scale * e.coeff);
      put(matno, B + 1, p + 2 * e.index + 2, p + 2 * e.index + 2, -scale * e.coeff);
    }
  };
  emit_row(0, prob.objective(), osign);
  for (int k = 0; k < K; ++k) emit_row(k + 1, prob.row(k), 1.0);

  std::ostringstream os;
  if (diag_dim > 0) {
    // layout hint so our importer can reconstruct scalars; a comment line
    // for any other SDPA reader
    os << "*sipsdp scalars: nonneg=" << p << " free=" << q << "\n";
  }
  os << K << "\n";
  os << nblocks << "\n";
  for (int b = 0; b < B; ++b) os << prob.block_dim(b) << (b + 1 < nblocks ? " " : "");
  if (diag_dim > 0) os << -diag_dim;
  os << "\n";
  for (int k = 0; k < K; ++k) os << fmt17(prob.row(k).rhs) << (k + 1 < K ? " " : "");
  os << "\n";
  for (const auto& [key, val] : acc) {
    if (val == 0.0) continue;
    auto [matno, blkno, i, j] = key;
    os << matno << " " << blkno << " " << i << " " << j << " " << fmt17(val) << "\n";
  }
  return os.str();
}

void export_sdpa(const SdpProblem& prob, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << sdpa_text(prob);
  if (!out) throw Error("write failure on " + path);
}

namespace {

struct TokenStream {
  std::istringstream in;
  int line = 0;
  std::string cur_line;
  std::istringstream ls;
  std::vector<std::string> comments;

  explicit TokenStream(const std::string& text) : in(text) {}

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("sdpa parse error at line " + std::to_string(line) + ": " + what);
  }

  bool next_data_line() {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line;
      if (!raw.empty() && (raw[0] == '"' || raw[0] == '*')) {  // comment
        comments.push_back(raw);
        continue;
      }
      for (char& ch : raw)
        if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
      bool blank = true;
      for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
      if (blank) continue;
      cur_line = raw;
      ls = std::istringstream(raw);
      return true;
    }
    return false;
  }

  long read_int() {
    long v;
    if (!(ls >> v)) fail("expected an integer");
    return v;
  }
  double read_double() {
    double v;
    if (!(ls >> v)) fail("expected a number");
    return v;
  }
};

}  // namespace

SdpProblem parse_sdpa(const std::string& text) {
  TokenStream ts(text);
  if (!ts.next_data_line()) ts.fail("missing constraint count");
  long m = ts.read_int();
  if (m < 0) ts.fail("negative constraint count");
  if (!ts.next_data_line()) ts.fail("missing block count");
  long nblocks = ts.read_int();
  if (nblocks < 0) ts.fail("negative block count");
  if (!ts.next_data_line()) ts.fail("missing block sizes");
  std::vector<long> sizes(static_cast<size_t>(nblocks));
  for (auto& s : sizes) s = ts.read_int();

  // scalar layout hint written by our exporter
  int hint_nonneg = -1, hint_free = -1;
  for (const auto& c : ts.comments) {
    int pn, qn;
    if (std::sscanf(c.c_str(), "*sipsdp scalars: nonneg=%d free=%d", &pn, &qn) == 2) {
      hint_nonneg = pn;
      hint_free = qn;
    }
  }

  SdpProblem prob;
  prob.set_sense(SdpProblem::Sense::minimize);
  // diagonal blocks become nonnegative scalars; psd blocks stay blocks
  std::vector<int> block_id(static_cast<size_t>(nblocks), -1);
  std::vector<int> diag_base(static_cast<size_t>(nblocks), -1);
  long hinted_block = -1;
  for (long b = 0; b < nblocks; ++b) {
    if (sizes[static_cast<size_t>(b)] == 0) ts.fail("zero block size");
    if (sizes[static_cast<size_t>(b)] > 0) {
      block_id[static_cast<size_t>(b)] =
          prob.add_psd_block("block" + std::to_string(b + 1), static_cast<int>(sizes[static_cast<size_t>(b)]));
    } else if (hint_nonneg >= 0 && b + 1 == nblocks &&
               -sizes[static_cast<size_t>(b)] == hint_nonneg + 2 * hint_free) {
      hinted_block = b;
      for (int i = 0; i < hint_nonneg; ++i) prob.add_nonneg_var("w" + std::to_string(i + 1));
      for (int i = 0; i < hint_free; ++i) prob.add_free_var("u" + std::to_string(i + 1));
    } else {
      diag_base[static_cast<size_t>(b)] = prob.num_nonneg();
      for (long i = 0; i < -sizes[static_cast<size_t>(b)]; ++i)
        prob.add_nonneg_var("diag" + std::to_string(b + 1) + "_" + std::to_string(i + 1));
    }
  }

  if (m > 0) {
    if (!ts.next_data_line()) ts.fail("missing right-hand side");
    for (long k = 0; k < m; ++k) prob.add_equality(ts.read_double());
  }

  while (ts.next_data_line()) {
    long matno = ts.read_int();
    long blkno = ts.read_int();
    long i = ts.read_int();
    long j = ts.read_int();
    double val = ts.read_double();
    if (matno < 0 || matno > m) ts.fail("matrix index out of range");
    if (blkno < 1 || blkno > nblocks) ts.fail("block index out of range");
    long bs = std::abs(sizes[static_cast<size_t>(blkno - 1)]);
    if (i < 1 || j < i || j > bs) ts.fail("entry indices must satisfy 1 <= i <= j <= dim");
    bool diag = sizes[static_cast<size_t>(blkno - 1)] < 0;
    if (diag && i != j) ts.fail("off-diagonal entry in a diagonal block");
    int eq = static_cast<int>(matno) - 1;
    if (diag && blkno - 1 == hinted_block) {
      int idx = static_cast<int>(i) - 1;
      if (idx < hint_nonneg) {
        if (eq < 0) prob.add_objective_nonneg(idx, val);
        else prob.add_nonneg_coeff(eq, idx, val);
      } else {
        int fi = (idx - hint_nonneg) / 2;
        if ((idx - hint_nonneg) % 2 == 1) continue;  // negated half of the split pair
        if (eq < 0) prob.add_objective_free(fi, val);
        else prob.add_free_coeff(eq, fi, val);
      }
    } else if (diag) {
      int var = diag_base[static_cast<size_t>(blkno - 1)] + static_cast<int>(i) - 1;
      if (eq < 0) prob.add_objective_nonneg(var, val);
      else prob.add_nonneg_coeff(eq, var, val);
    } else {
      int blk = block_id[static_cast<size_t>(blkno - 1)];
      if (eq < 0) prob.add_objective_entry(blk, static_cast<int>(i) - 1, static_cast<int>(j) - 1, val);
      else prob.add_entry_coeff(eq, blk, static_cast<int>(i) - 1, static_cast<int>(j) - 1, val);
    }
  }
  return prob;
}

SdpProblem import_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sdpa(buf.str());
}

}  // namespace sipsdp
