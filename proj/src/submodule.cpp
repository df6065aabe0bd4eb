#include "dacurv/submodule.hpp"

#include <algorithm>

#include "dacurv/errors.hpp"
#include "dacurv/kernels.hpp"

namespace dacurv {

SubmoduleTruncation::SubmoduleTruncation(const ModuleSpec& spec, const FockTruncation& t, SubmoduleOptions opts)
    : spec_(spec), t_(&t) {
  spec_.validate();
  if (spec_.N != t.multiplicity()) {
    throw InputError("spec has N = " + std::to_string(spec_.N) + " but the truncation has N = " +
                     std::to_string(t.multiplicity()));
  }
  for (std::size_t g = 0; g < spec_.generators.size(); ++g) {
    const auto& v = spec_.generators[g];
    if (v.is_zero()) continue;
    if (v.max_variable() > t.active_vars() || v.degree() > static_cast<int>(t.cutoff())) {
      throw InputError("generator " + std::to_string(g + 1) + " " + v.to_string() +
                       " does not fit the truncation " + t.describe());
    }
  }

  grading_ = detect_grading(spec_);
  const std::size_t N = t.multiplicity();
  slice_of_.assign(t.size(), 0);
  local_of_.assign(t.size(), 0);

  if (grading_) {
    const int top = static_cast<int>(t.cutoff()) + grading_->max_shift();
    slices_.resize(static_cast<std::size_t>(top) + 1);
    for (int w = 0; w <= top; ++w) {
      slices_[static_cast<std::size_t>(w)].weight = w;
      slices_[static_cast<std::size_t>(w)].complete = w <= static_cast<int>(t.cutoff());
    }
    for (std::size_t k = 0; k < t.num_monomials(); ++k) {
      for (std::size_t c = 0; c < N; ++c) {
        std::size_t g = t.basis_index(k, c);
        auto w = static_cast<std::size_t>(t.degree(k) + grading_->shifts[c]);
        slice_of_[g] = w;
        local_of_[g] = slices_[w].basis.size();
        slices_[w].basis.push_back(g);
      }
    }
  } else {
    slices_.resize(1);
    slices_[0].weight = 0;
    slices_[0].complete = false;
    for (std::size_t g = 0; g < t.size(); ++g) {
      local_of_[g] = g;
      slices_[0].basis.push_back(g);
    }
  }

  const auto gens = spec_.nonzero_generators();
  const auto count = static_cast<std::ptrdiff_t>(slices_.size());
#pragma omp parallel for schedule(dynamic, 1) if (opts.exec == Exec::Parallel)
  for (std::ptrdiff_t b = 0; b < count; ++b) build_slice(slices_[static_cast<std::size_t>(b)], gens, opts);
}

void SubmoduleTruncation::build_slice(Slice& s, const std::vector<VectorPolynomial>& gens,
                                      const SubmoduleOptions& opts) const {
  const FockTruncation& t = *t_;
  const std::size_t N = t.multiplicity();
  const int n = static_cast<int>(t.cutoff());
  const auto D = static_cast<Eigen::Index>(s.basis.size());

  // Columns z^alpha g for every generator g and admissible alpha.
  std::vector<Eigen::VectorXd> cols;
  std::vector<std::uint16_t> dense(t.active_vars());
  for (std::size_t gi = 0; gi < gens.size(); ++gi) {
    const auto& g = gens[gi];
    const int deg = g.degree();
    int lo = 0;
    int hi = n - deg;
    if (grading_) {
      int a = s.weight - grading_->generator_weights[gi];
      lo = std::max(lo, a);
      hi = std::min(hi, a);
    }
    for (int a = lo; a <= hi; ++a) {
      for (std::size_t k = t.degree_begin(static_cast<std::uint32_t>(a));
           k < t.degree_begin(static_cast<std::uint32_t>(a) + 1); ++k) {
        auto alpha = t.exponents(k);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(D);
        for (std::size_t j = 0; j < N; ++j) {
          for (const auto& [e, c] : g[j].terms()) {
            std::copy(alpha.begin(), alpha.end(), dense.begin());
            for (const auto& [var, exp] : e.entries())
              dense[var - 1] = static_cast<std::uint16_t>(dense[var - 1] + exp);
            std::size_t mono = t.find(dense);
            std::size_t global = t.basis_index(mono, j);
            v[static_cast<Eigen::Index>(local_of_[global])] += c.get_d() * t.norm(mono);
          }
        }
        cols.push_back(std::move(v));
      }
    }
  }

  Eigen::MatrixXd A(D, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) A.col(static_cast<Eigen::Index>(j)) = cols[j];
  s.sub = orthonormal_basis(A, opts.drop_tol);
  if (opts.build_complement) s.quo = orthogonal_complement(s.sub, D);
}

const Slice* SubmoduleTruncation::slice_with_weight(int w) const {
  if (!grading_) return w == 0 ? &slices_[0] : nullptr;
  if (w < 0 || w >= static_cast<int>(slices_.size())) return nullptr;
  return &slices_[static_cast<std::size_t>(w)];
}

std::size_t SubmoduleTruncation::dim() const {
  std::size_t d = 0;
  for (const auto& s : slices_) d += static_cast<std::size_t>(s.sub.cols());
  return d;
}

std::size_t SubmoduleTruncation::dim_quotient() const {
  std::size_t d = 0;
  for (const auto& s : slices_) d += s.basis.size() - static_cast<std::size_t>(s.sub.cols());
  return d;
}

int SubmoduleTruncation::exact_degree() const {
  if (!grading_) return -1;
  return std::max(-1, static_cast<int>(t_->cutoff()) - grading_->max_shift());
}

namespace {

Eigen::MatrixXd scatter(const std::vector<Slice>& slices, std::size_t size, bool quotient) {
  Eigen::Index cols = 0;
  for (const auto& s : slices) cols += quotient ? s.quo.cols() : s.sub.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), cols);
  Eigen::Index offset = 0;
  for (const auto& s : slices) {
    const Eigen::MatrixXd& B = quotient ? s.quo : s.sub;
    for (std::size_t l = 0; l < s.basis.size(); ++l)
      out.row(static_cast<Eigen::Index>(s.basis[l])).segment(offset, B.cols()) = B.row(static_cast<Eigen::Index>(l));
    offset += B.cols();
  }
  return out;
}

}  // namespace

Eigen::MatrixXd SubmoduleTruncation::sub_basis() const { return scatter(slices_, t_->size(), false); }

Eigen::MatrixXd SubmoduleTruncation::quotient_basis() const {
  for (const auto& s : slices_)
    if (s.quo.rows() != static_cast<Eigen::Index>(s.basis.size()))
      throw InputError("complement basis was not built for this submodule");
  return scatter(slices_, t_->size(), true);
}

Eigen::MatrixXd SubmoduleTruncation::projection() const {
  Eigen::MatrixXd Q = sub_basis();
  return Q * Q.transpose();
}

Eigen::MatrixXd SubmoduleTruncation::quotient_projection() const {
  Eigen::MatrixXd V = quotient_basis();
  return V * V.transpose();
}

double QuotientOperator::trace() const {
  double t = 0;
  for (const auto& b : blocks) t += b.trace();
  return t;
}

std::size_t QuotientOperator::rank(double rel_tol) const {
  std::vector<Eigen::VectorXd> eig;
  double top = 0;
  for (const auto& b : blocks) {
    if (b.size() == 0) {
      eig.emplace_back();
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()), Eigen::EigenvaluesOnly);
    eig.push_back(es.eigenvalues());
    top = std::max(top, es.eigenvalues().maxCoeff());
  }
  if (top <= 0) return 0;
  std::size_t r = 0;
  for (const auto& e : eig) r += static_cast<std::size_t>((e.array() > rel_tol * top).count());
  return r;
}

QuotientOperator& QuotientOperator::operator+=(const QuotientOperator& o) {
  if (blocks.empty()) {
    *this = o;
    return *this;
  }
  if (o.blocks.size() != blocks.size()) throw InputError("quotient operators on different truncations");
  for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] += o.blocks[b];
  contaminated = contaminated || o.contaminated;
  return *this;
}

CompressedShifts::CompressedShifts(const SubmoduleTruncation& sub, std::uint32_t m_vars, Exec exec)
    : sub_(&sub), m_(m_vars) {
  const FockTruncation& t = sub.truncation();
  if (m_vars == 0 || m_vars > t.active_vars()) throw InputError("compressed shifts need 1 <= m <= active variables");
  const auto& slices = sub.slices();
  const std::size_t N = t.multiplicity();
  T_.assign(m_vars, std::vector<Eigen::MatrixXd>(slices.size()));
  const auto nblocks = static_cast<std::ptrdiff_t>(slices.size());
  for (std::uint32_t i = 1; i <= m_vars; ++i) {
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::Parallel)
    for (std::ptrdiff_t bb = 0; bb < nblocks; ++bb) {
      auto b = static_cast<std::size_t>(bb);
      std::size_t next = sub.graded() ? b + 1 : b;
      const Slice& src = slices[b];
      if (next >= slices.size()) {
        T_[i - 1][b] = Eigen::MatrixXd::Zero(0, src.quo.cols());
        continue;
      }
      const Slice& dst = slices[next];
      Eigen::MatrixXd SQ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dst.basis.size()), src.quo.cols());
      for (std::size_t l = 0; l < src.basis.size(); ++l) {
        std::size_t g = src.basis[l];
        std::size_t mono = g / N;
        std::size_t target = t.shift_target(i, mono);
        if (target == kNoIndex) continue;
        std::size_t g2 = t.basis_index(target, g % N);
        SQ.row(static_cast<Eigen::Index>(sub.local_index(g2))) +=
            t.shift_coeff(i, mono) * src.quo.row(static_cast<Eigen::Index>(l));
      }
      T_[i - 1][b] = dst.quo.transpose() * SQ;
    }
  }
}

QuotientOperator CompressedShifts::phi(const QuotientOperator& X, Exec exec) const {
  const auto& slices = sub_->slices();
  if (X.blocks.size() != slices.size()) throw InputError("operator does not live on this quotient");
  QuotientOperator Y;
  Y.blocks.resize(slices.size());
  for (std::size_t b = 0; b < slices.size(); ++b)
    Y.blocks[b] = Eigen::MatrixXd::Zero(slices[b].quo.cols(), slices[b].quo.cols());
  const auto nblocks = static_cast<std::ptrdiff_t>(slices.size());
  if (sub_->graded()) {
    // Output block b + 1 depends only on input block b.
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::Parallel)
    for (std::ptrdiff_t bb = 0; bb < nblocks - 1; ++bb) {
      auto b = static_cast<std::size_t>(bb);
      if (X.blocks[b].size() == 0 || X.blocks[b].isZero(0.0)) continue;
      for (std::uint32_t i = 0; i < m_; ++i) {
        const Eigen::MatrixXd& T = T_[i][b];
        Y.blocks[b + 1].noalias() += T * X.blocks[b] * T.transpose();
      }
    }
  } else {
    for (std::uint32_t i = 0; i < m_; ++i) {
      const Eigen::MatrixXd& T = T_[i][0];
      Y.blocks[0].noalias() += T * X.blocks[0] * T.transpose();
    }
  }
  Y.contaminated = X.contaminated;
  for (std::size_t b = 0; b < slices.size(); ++b)
    if (!slices[b].complete && Y.blocks[b].size() > 0 && !Y.blocks[b].isZero(0.0)) Y.contaminated = true;
  return Y;
}

QuotientOperator CompressedShifts::phi_power(const QuotientOperator& X, int k, Exec exec) const {
  if (k < 0) throw InputError("negative iterate count");
  QuotientOperator Y = X;
  for (int j = 0; j < k; ++j) Y = phi(Y, exec);
  return Y;
}

QuotientOperator quotient_defect_squared(const SubmoduleTruncation& sub) {
  const FockTruncation& t = sub.truncation();
  const auto& slices = sub.slices();
  QuotientOperator D;
  D.blocks.resize(slices.size());
  for (std::size_t b = 0; b < slices.size(); ++b) {
    const Slice& s = slices[b];
    std::vector<Eigen::Index> rows;
    for (std::size_t c = 0; c < t.multiplicity(); ++c) {
      std::size_t g = t.basis_index(0, c);
      if (sub.slice_of(g) == b) rows.push_back(static_cast<Eigen::Index>(sub.local_index(g)));
    }
    Eigen::MatrixXd B(static_cast<Eigen::Index>(rows.size()), s.quo.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) B.row(static_cast<Eigen::Index>(r)) = s.quo.row(rows[r]);
    D.blocks[b] = B.transpose() * B;
    if (!s.complete && !D.blocks[b].isZero(0.0)) D.contaminated = true;
  }
  return D;
}

std::size_t enumerated_quotient_dim(const SubmoduleTruncation& sub, std::uint32_t m_vars, int n, double tol) {
  const FockTruncation& t = sub.truncation();
  const std::size_t N = t.multiplicity();
  m_vars = std::min(m_vars, t.active_vars());
  std::vector<Eigen::VectorXd> svals;
  double top = 0;
  for (const auto& s : sub.slices()) {
    std::vector<Eigen::Index> rows;
    for (std::size_t l = 0; l < s.basis.size(); ++l) {
      std::size_t mono = s.basis[l] / N;
      if (t.degree(mono) > n) continue;
      auto a = t.exponents(mono);
      bool inside = std::all_of(a.begin() + m_vars, a.end(), [](std::uint16_t x) { return x == 0; });
      if (inside) rows.push_back(static_cast<Eigen::Index>(l));
    }
    if (rows.empty() || s.quo.cols() == 0) continue;
    Eigen::MatrixXd G(static_cast<Eigen::Index>(rows.size()), s.quo.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) G.row(static_cast<Eigen::Index>(r)) = s.quo.row(rows[r]);
    svals.push_back(singular_values(G));
    if (svals.back().size() > 0) top = std::max(top, svals.back()[0]);
  }
  if (top <= 0) return 0;
  std::size_t r = 0;
  for (const auto& s : svals) r += static_cast<std::size_t>((s.array() > tol * top).count());
  return r;
}

}  // namespace dacurv
