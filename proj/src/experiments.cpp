#include "dacurv/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>

#include "dacurv/errors.hpp"
#include "dacurv/fock.hpp"
#include "dacurv/submodule.hpp"

namespace dacurv {

namespace {

mpz_class factorial(unsigned long k) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), k);
  return out;
}

Rational monomial_weight(const ExponentVector& e) {
  mpz_class num = 1;
  for (const auto& [var, exp] : e.entries()) num *= factorial(exp);
  Rational w(num, factorial(e.total_degree()));
  w.canonicalize();
  return w;
}

// Solves G c = b over Q by Gauss-Jordan elimination; G must be nonsingular.
std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> G, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && G[piv][col] == 0) ++piv;
    if (piv == n) throw InconsistencyError("normal equations are singular");
    std::swap(G[piv], G[col]);
    std::swap(b[piv], b[col]);
    Rational inv = 1 / G[col][col];
    for (std::size_t j = col; j < n; ++j) G[col][j] *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || G[r][col] == 0) continue;
      Rational factor = G[r][col];
      for (std::size_t j = col; j < n; ++j) G[r][j] -= factor * G[col][j];
      b[r] -= factor * b[col];
    }
  }
  return b;
}

std::vector<ExponentVector> homogeneous_monomials(std::uint32_t m, std::uint32_t degree) {
  FockTruncation t(m, degree, 1);
  std::vector<ExponentVector> out;
  for (std::size_t k = t.degree_begin(degree); k < t.num_monomials(); ++k) out.push_back(t.exponent_vector(k));
  return out;
}

}  // namespace

Rational section5_lambda(int i) {
  if (i < 1) throw InputError("lambda index starts at 1");
  Rational l(1, factorial(static_cast<unsigned long>(i) + 1));
  l.canonicalize();
  return l;
}

Polynomial section5_generator(int m) {
  if (m < 1) throw InputError("the generator needs at least one variable");
  Polynomial f;
  for (int i = 1; i <= m; ++i) f.add_term(ExponentVector::variable(static_cast<std::uint32_t>(i)), section5_lambda(i));
  return f;
}

Rational fock_inner(const Polynomial& a, const Polynomial& b) {
  const Polynomial& small = a.num_terms() <= b.num_terms() ? a : b;
  const Polynomial& large = a.num_terms() <= b.num_terms() ? b : a;
  Rational sum = 0;
  for (const auto& [e, c] : small.terms()) {
    Rational other = large.coefficient(e);
    if (other != 0) sum += c * other * monomial_weight(e);
  }
  sum.canonicalize();
  return sum;
}

Section5Result section5_bound_check(const Section5Config& cfg) {
  if (cfg.n < 1) throw InputError("n must be at least 1");
  if (cfg.d0 <= cfg.n) throw InputError("d0 must exceed n");
  Section5Result res;
  res.q = cfg.q.is_zero() ? Polynomial::monomial(ExponentVector::variable(1, static_cast<std::uint32_t>(cfg.n)), 1)
                          : cfg.q;
  if (!res.q.is_homogeneous() || res.q.degree() != cfg.n) throw InputError("q must be homogeneous of degree n");
  if (res.q.max_variable() > static_cast<std::uint32_t>(cfg.d0)) throw InputError("q may only involve z1..z_d0");

  std::vector<int> ms = cfg.m_values.empty() ? std::vector<int>{cfg.d0 + 2, cfg.d0 + 4} : cfg.m_values;
  for (int m : ms)
    if (m < cfg.d0 + 2) throw InputError("active variables must be at least d0 + 2");

  res.q_norm2 = fock_inner(res.q, res.q);
  const auto d0 = static_cast<unsigned long>(cfg.d0);
  mpz_class denom = 4 * d0 * d0 * d0 * factorial(d0 + 1);
  mpz_class f4 = factorial(d0 + 4);
  denom *= f4 * f4;
  res.bound = res.q_norm2 / Rational(denom);
  res.bound.canonicalize();

  for (int m : ms) {
    Section5Row row;
    row.m = m;
    const Polynomial f = section5_generator(m);
    const auto betas = homogeneous_monomials(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(cfg.n - 1));
    row.unknowns = betas.size();
    std::vector<Polynomial> products;
    products.reserve(betas.size());
    for (const auto& beta : betas) products.push_back(Polynomial::monomial(beta, 1) * f);

    const std::size_t U = products.size();
    std::vector<std::vector<Rational>> G(U, std::vector<Rational>(U));
    std::vector<Rational> b(U);
    for (std::size_t i = 0; i < U; ++i) {
      b[i] = fock_inner(products[i], res.q);
      for (std::size_t j = i; j < U; ++j) G[i][j] = G[j][i] = fock_inner(products[i], products[j]);
    }

    if (U <= cfg.exact_limit) {
      auto c = solve_exact(G, b);
      Rational proj = 0;
      for (std::size_t i = 0; i < U; ++i) proj += b[i] * c[i];
      row.distance2 = res.q_norm2 - proj;
      row.distance2.canonicalize();
      row.distance2_value = row.distance2.get_d();
      row.pass = row.distance2 >= res.bound;
    } else {
      row.exact = false;
      Eigen::MatrixXd Gd(U, U);
      Eigen::VectorXd bd(U);
      for (std::size_t i = 0; i < U; ++i) {
        bd(static_cast<Eigen::Index>(i)) = b[i].get_d();
        for (std::size_t j = 0; j < U; ++j) Gd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = G[i][j].get_d();
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(Gd);
      Eigen::VectorXd c = ldlt.solve(bd);
      for (int it = 0; it < 2; ++it) c += ldlt.solve(bd - Gd * c);
      row.distance2_value = res.q_norm2.get_d() - bd.dot(c);
      row.pass = row.distance2_value >= res.bound.get_d();
    }
    res.rows.push_back(row);
  }

  res.pass = std::all_of(res.rows.begin(), res.rows.end(), [](const Section5Row& r) { return r.pass; });
  std::vector<const Section5Row*> by_m;
  for (const auto& r : res.rows) by_m.push_back(&r);
  std::sort(by_m.begin(), by_m.end(), [](auto* x, auto* y) { return x->m < y->m; });
  for (std::size_t i = 1; i < by_m.size(); ++i) {
    bool exact = by_m[i]->exact && by_m[i - 1]->exact;
    bool ok = exact ? by_m[i]->distance2 >= by_m[i - 1]->distance2
                    : by_m[i]->distance2_value >= by_m[i - 1]->distance2_value - 1e-12;
    if (!ok) res.nondecreasing = false;
  }
  return res;
}

int order_of_vanishing(const Polynomial& f) {
  if (f.is_zero()) throw InputError("N(f) is undefined for f = 0");
  return f.low_degree();
}

DefectAssembly defect_squared_submodule(const ModuleSpec& spec, std::uint32_t m_vars, int cutoff, Exec exec) {
  spec.validate();
  if (cutoff < 1) throw InputError("defect cutoff must be at least 1");
  if (m_vars == 0) m_vars = spec.num_vars();
  if (spec.max_active_variable() > m_vars) throw InputError("generators use variables beyond the truncation");

  FockTruncation t(m_vars, static_cast<std::uint32_t>(cutoff), spec.N, kDefectMaxBasis);
  SubmoduleOptions so;
  so.build_complement = false;
  so.exec = exec;
  SubmoduleTruncation sub(spec, t, so);

  DefectAssembly out;
  out.cutoff = cutoff;
  out.exact_degree = sub.exact_degree();
  out.contaminated = !sub.graded();
  const int zone_top = out.contaminated ? cutoff - 1 : out.exact_degree - 1;
  for (std::size_t g = 0; g < t.size(); ++g)
    if (t.degree(g / t.multiplicity()) <= zone_top) out.zone.push_back(g);
  const auto z = static_cast<Eigen::Index>(out.zone.size());
  const auto dim = static_cast<Eigen::Index>(t.size());
  if (z == 0) return out;

  const Eigen::MatrixXd Q = sub.sub_basis();
  Eigen::MatrixXd Qz(z, Q.cols());
  for (Eigen::Index r = 0; r < z; ++r) Qz.row(r) = Q.row(static_cast<Eigen::Index>(out.zone[r]));

  // (a) on M itself: I - sum_i M_i M_i^T with M_i = Q^T S_i Q, from explicit shift matrices.
  Eigen::MatrixXd onM = Eigen::MatrixXd::Identity(Q.cols(), Q.cols());
  for (std::uint32_t i = 1; i <= m_vars; ++i) {
    Eigen::SparseMatrix<double> S = shift_matrix(t, i).matrix.sparseView();
    Eigen::MatrixXd Mi = Q.transpose() * (S * Q);
    onM.noalias() -= Mi * Mi.transpose();
  }
  out.a = Qz * onM * Qz.transpose();

  // (b) in the ambient space with commutators built from the gather kernels.
  const Eigen::MatrixXd P = sub.projection();
  const Eigen::MatrixXd Perp = Eigen::MatrixXd::Identity(dim, dim) - P;
  Eigen::MatrixXd Pz(z, dim);
  for (Eigen::Index r = 0; r < z; ++r) Pz.row(r) = P.row(static_cast<Eigen::Index>(out.zone[r]));

  out.b = Eigen::MatrixXd::Zero(z, z);
  for (std::size_t c = 0; c < t.multiplicity(); ++c) {
    // E_0 is the rank-N projection onto the constants.
    out.b.noalias() += Pz.col(static_cast<Eigen::Index>(c)) * Pz.col(static_cast<Eigen::Index>(c)).transpose();
  }
  for (std::uint32_t i = 1; i <= m_vars; ++i) {
    // [S_i, P_perp] = S_i P_perp - P_perp S_i, and [P_perp, S_i^*] is its transpose.
    Eigen::MatrixXd comm = apply_shift(t, i, Perp, exec);
    comm.noalias() -= apply_shift_adjoint(t, i, Perp, exec).transpose();
    Eigen::MatrixXd left = Pz * comm;
    out.b.noalias() += left * left.transpose();
  }

  out.max_difference = (out.a - out.b).cwiseAbs().maxCoeff();

  // Weighted degree |alpha| + shift_j; plain degree when there is no grading.
  auto weight = [&](std::size_t g) {
    int w = t.degree(g / t.multiplicity());
    if (sub.graded()) w += sub.grading()->shifts[g % t.multiplicity()];
    return w;
  };
  for (Eigen::Index r = 0; r < z; ++r)
    for (Eigen::Index c = 0; c < z; ++c) {
      // (E_k P - P E_k)(r, c) = P(r, c) ([w(r) = k] - [w(c) = k]).
      if (weight(out.zone[r]) != weight(out.zone[c]))
        out.grading_error = std::max(out.grading_error, std::abs(Pz(r, static_cast<Eigen::Index>(out.zone[c]))));
    }

  Eigen::MatrixXd sym = 0.5 * (out.a + out.a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  out.min_eigenvalue = ev.minCoeff();
  double top = std::max(ev.maxCoeff(), 0.0);
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) > kDefectRankTol * top) ++out.rank;
  return out;
}

DefectGrowth defect_rank_growth(const Polynomial& f, const std::vector<int>& cutoffs, std::uint32_t m_vars, Exec exec) {
  if (f.is_zero()) throw InputError("the generator must be nonzero");
  if (cutoffs.empty()) throw InputError("no cutoffs given");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (cutoffs[i] <= cutoffs[i - 1]) throw InputError("cutoffs must increase");

  DefectGrowth g;
  g.f = f;
  g.m_vars = m_vars == 0 ? f.max_variable() + 2 : m_vars;
  if (f.max_variable() > g.m_vars) throw InputError("f uses variables beyond the truncation");

  ModuleSpec spec;
  spec.d = g.m_vars;
  spec.N = 1;
  spec.generators = {VectorPolynomial(std::vector<Polynomial>{f})};

  for (int c : cutoffs) {
    DefectAssembly a = defect_squared_submodule(spec, g.m_vars, c, exec);
    g.rows.push_back({c, a.rank, a.zone.size(), a.max_difference});
  }
  for (std::size_t i = 1; i < g.rows.size(); ++i) {
    if (g.rows[i].rank < g.rows[i - 1].rank) g.nondecreasing = false;
    if (g.rows[i].rank != g.rows[0].rank) g.constant = false;
  }
  for (std::size_t i = 0; i + 2 < g.rows.size(); ++i)
    if (g.rows[i + 2].rank <= g.rows[i].rank) g.grows_in_every_window = false;
  return g;
}

}  // namespace dacurv
