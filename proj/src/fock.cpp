#include "dacurv/fock.hpp"

#include <cmath>

#include "dacurv/errors.hpp"

namespace dacurv {

std::size_t count_monomials(std::uint32_t m, std::uint32_t n) {
  // C(m + n, m) built incrementally; each partial product is itself a binomial.
  unsigned long long c = 1;
  for (std::uint32_t k = 1; k <= m; ++k) {
    unsigned long long num = c * (n + k);
    if (num / (n + k) != c) return kNoIndex;
    c = num / k;
  }
  return static_cast<std::size_t>(c);
}

namespace {

void enumerate_degree(std::uint32_t m, std::uint32_t var, int remaining, std::vector<std::uint16_t>& cur,
                      std::vector<std::uint16_t>& out) {
  if (var + 1 == m) {
    cur[var] = static_cast<std::uint16_t>(remaining);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[var] = static_cast<std::uint16_t>(e);
    enumerate_degree(m, var + 1, remaining - e, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

FockTruncation::FockTruncation(std::uint32_t m, std::uint32_t n, std::size_t N, std::size_t size_cap)
    : m_(m), n_(n), N_(N) {
  if (m == 0) throw InputError("truncation needs at least one variable");
  if (N == 0) throw InputError("truncation needs N >= 1");
  if (n > 60000) throw InputError("cutoff too large");
  std::size_t monos = count_monomials(m, n);
  if (monos == kNoIndex || monos > size_cap / N || monos * N > size_cap) {
    throw InputError("truncation with m = " + std::to_string(m) + ", n = " + std::to_string(n) +
                     ", N = " + std::to_string(N) + " exceeds the size cap of " +
                     std::to_string(size_cap) + " basis elements");
  }

  exps_.reserve(monos * m);
  std::vector<std::uint16_t> cur(m, 0);
  for (std::uint32_t t = 0; t <= n; ++t) {
    degree_start_.push_back(exps_.size() / m);
    enumerate_degree(m, 0, static_cast<int>(t), cur, exps_);
  }
  degree_start_.push_back(exps_.size() / m);

  const std::size_t count = exps_.size() / m;
  degree_.resize(count);
  norm_.resize(count);
  lookup_.reserve(count);
  for (std::uint32_t t = 0; t <= n; ++t)
    for (std::size_t k = degree_start_[t]; k < degree_start_[t + 1]; ++k) degree_[k] = static_cast<int>(t);
  for (std::size_t k = 0; k < count; ++k) lookup_.emplace(key(exponents(k)), k);

  shift_target_.assign(static_cast<std::size_t>(m) * count, kNoIndex);
  shift_source_.assign(static_cast<std::size_t>(m) * count, kNoIndex);
  shift_coeff_.assign(static_cast<std::size_t>(m) * count, 0.0);
  std::vector<std::uint16_t> tmp(m);
  for (std::size_t k = 0; k < count; ++k) {
    auto a = exponents(k);
    for (std::uint32_t i = 0; i < m; ++i) {
      std::size_t slot = static_cast<std::size_t>(i) * count + k;
      shift_coeff_[slot] = std::sqrt(static_cast<double>(a[i] + 1) / static_cast<double>(degree_[k] + 1));
      if (degree_[k] < static_cast<int>(n)) {
        std::copy(a.begin(), a.end(), tmp.begin());
        ++tmp[i];
        shift_target_[slot] = find(tmp);
      }
      if (a[i] > 0) {
        std::copy(a.begin(), a.end(), tmp.begin());
        --tmp[i];
        shift_source_[slot] = find(tmp);
      }
    }
  }

  // ||z^alpha|| = ||z^(alpha - e_i)|| * sqrt(alpha_i / |alpha|) for any i with alpha_i > 0.
  norm_[0] = 1.0;
  for (std::size_t k = 1; k < count; ++k) {
    auto a = exponents(k);
    std::uint32_t i = 0;
    while (a[i] == 0) ++i;
    std::size_t parent = shift_source_[static_cast<std::size_t>(i) * count + k];
    norm_[k] = norm_[parent] * std::sqrt(static_cast<double>(a[i]) / static_cast<double>(degree_[k]));
  }
}

std::string FockTruncation::key(std::span<const std::uint16_t> dense) const {
  return std::string(reinterpret_cast<const char*>(dense.data()), dense.size() * sizeof(std::uint16_t));
}

ExponentVector FockTruncation::exponent_vector(std::size_t k) const {
  auto a = exponents(k);
  std::vector<int> dense(a.begin(), a.end());
  return ExponentVector::from_dense(dense);
}

std::size_t FockTruncation::find(std::span<const std::uint16_t> dense) const {
  auto it = lookup_.find(key(dense));
  return it == lookup_.end() ? kNoIndex : it->second;
}

std::size_t FockTruncation::find(const ExponentVector& e) const {
  if (e.max_variable() > m_ || e.total_degree() > n_) return kNoIndex;
  std::vector<std::uint16_t> dense(m_, 0);
  for (const auto& [var, exp] : e.entries()) dense[var - 1] = static_cast<std::uint16_t>(exp);
  return find(dense);
}

Rational FockTruncation::weight(std::size_t k) const {
  mpz_class num = 1;
  mpz_class den;
  for (auto a : exponents(k)) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), a);
    num *= f;
  }
  mpz_fac_ui(den.get_mpz_t(), static_cast<unsigned long>(degree_[k]));
  Rational w(num, den);
  w.canonicalize();
  return w;
}

Eigen::VectorXd FockTruncation::coordinates(const VectorPolynomial& v) const {
  if (v.ambient_dim() != N_) throw InputError("vector polynomial has the wrong number of components");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < N_; ++j) {
    for (const auto& [e, c] : v[j].terms()) {
      std::size_t k = find(e);
      if (k == kNoIndex) {
        throw InputError("term " + e.to_string() + " lies outside the truncation " + describe());
      }
      out[static_cast<Eigen::Index>(basis_index(k, j))] += c.get_d() * norm_[k];
    }
  }
  return out;
}

bool FockTruncation::coordinates_shifted(const VectorPolynomial& v, std::span<const std::uint16_t> alpha,
                                         Eigen::VectorXd& out) const {
  out.setZero(static_cast<Eigen::Index>(size()));
  bool complete = true;
  std::vector<std::uint16_t> dense(m_);
  for (std::size_t j = 0; j < N_; ++j) {
    for (const auto& [e, c] : v[j].terms()) {
      if (e.max_variable() > m_) {
        complete = false;
        continue;
      }
      std::copy(alpha.begin(), alpha.end(), dense.begin());
      std::uint32_t deg = e.total_degree();
      for (auto a : alpha) deg += a;
      if (deg > n_) {
        complete = false;
        continue;
      }
      for (const auto& [var, exp] : e.entries()) dense[var - 1] = static_cast<std::uint16_t>(dense[var - 1] + exp);
      std::size_t k = find(dense);
      out[static_cast<Eigen::Index>(basis_index(k, j))] += c.get_d() * norm_[k];
    }
  }
  return complete;
}

std::string FockTruncation::describe() const {
  return "(m = " + std::to_string(m_) + ", n = " + std::to_string(n_) + ", N = " + std::to_string(N_) + ")";
}

OperatorMatrix shift_matrix(const FockTruncation& t, std::uint32_t i) {
  if (i == 0 || i > t.active_vars()) throw InputError("shift variable out of range");
  const auto dim = static_cast<Eigen::Index>(t.size());
  OperatorMatrix op;
  op.matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < t.num_monomials(); ++k) {
    std::size_t target = t.shift_target(i, k);
    if (target == kNoIndex) continue;
    for (std::size_t c = 0; c < t.multiplicity(); ++c) {
      op.matrix(static_cast<Eigen::Index>(t.basis_index(target, c)),
                static_cast<Eigen::Index>(t.basis_index(k, c))) = t.shift_coeff(i, k);
    }
  }
  op.exact_degree = static_cast<int>(t.cutoff()) - 1;
  return op;
}

OperatorMatrix shift_adjoint_matrix(const FockTruncation& t, std::uint32_t i) {
  OperatorMatrix op = shift_matrix(t, i);
  op.matrix.transposeInPlace();
  op.exact_degree = static_cast<int>(t.cutoff());
  return op;
}

Eigen::MatrixXd degree_projection(const FockTruncation& t, std::uint32_t k) {
  const auto dim = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  if (k > t.cutoff()) return p;
  for (std::size_t mono = t.degree_begin(k); mono < t.degree_begin(k + 1); ++mono)
    for (std::size_t c = 0; c < t.multiplicity(); ++c) {
      auto idx = static_cast<Eigen::Index>(t.basis_index(mono, c));
      p(idx, idx) = 1.0;
    }
  return p;
}

Eigen::MatrixXd apply_shift(const FockTruncation& t, std::uint32_t i, const Eigen::MatrixXd& X, Exec exec) {
  if (i == 0 || i > t.active_vars()) throw InputError("shift variable out of range");
  const std::size_t N = t.multiplicity();
  const auto monos = static_cast<std::ptrdiff_t>(t.num_monomials());
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(X.rows(), X.cols());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::ptrdiff_t k = 0; k < monos; ++k) {
    std::size_t src = t.shift_source(i, static_cast<std::size_t>(k));
    if (src == kNoIndex) continue;
    double coef = t.shift_coeff(i, src);
    for (std::size_t c = 0; c < N; ++c) {
      Y.row(static_cast<Eigen::Index>(static_cast<std::size_t>(k) * N + c)) =
          coef * X.row(static_cast<Eigen::Index>(src * N + c));
    }
  }
  return Y;
}

Eigen::MatrixXd apply_shift_adjoint(const FockTruncation& t, std::uint32_t i, const Eigen::MatrixXd& X,
                                    Exec exec) {
  if (i == 0 || i > t.active_vars()) throw InputError("shift variable out of range");
  const std::size_t N = t.multiplicity();
  const auto monos = static_cast<std::ptrdiff_t>(t.num_monomials());
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(X.rows(), X.cols());
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::ptrdiff_t k = 0; k < monos; ++k) {
    std::size_t dst = t.shift_target(i, static_cast<std::size_t>(k));
    if (dst == kNoIndex) continue;
    double coef = t.shift_coeff(i, static_cast<std::size_t>(k));
    for (std::size_t c = 0; c < N; ++c) {
      Y.row(static_cast<Eigen::Index>(static_cast<std::size_t>(k) * N + c)) =
          coef * X.row(static_cast<Eigen::Index>(dst * N + c));
    }
  }
  return Y;
}

}  // namespace dacurv
