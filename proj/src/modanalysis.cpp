#include "dacurv/modanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dacurv/errors.hpp"
#include "dacurv/fock.hpp"
#include "dacurv/submodule.hpp"

namespace dacurv {

Point random_ball_point(Rng& rng, std::uint32_t num_vars) {
  num_vars = std::max<std::uint32_t>(1, num_vars);
  const double radius = 0.5 / std::sqrt(static_cast<double>(num_vars));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p(num_vars);
  for (auto& z : p) {
    double r = radius * std::sqrt(u(rng));
    double theta = 2 * std::numbers::pi * u(rng);
    z = std::polar(r, theta);
  }
  return p;
}

std::vector<Rational> random_rational_point(Rng& rng, std::uint32_t num_vars) {
  num_vars = std::max<std::uint32_t>(1, num_vars);
  const double radius = 0.5 / std::sqrt(static_cast<double>(num_vars));
  std::uniform_int_distribution<long> den(1, 1000000);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<Rational> p;
  for (std::uint32_t k = 0; k < num_vars; ++k) {
    long q = den(rng);
    Rational x(std::lround(u(rng) * static_cast<double>(q)), q);
    x.canonicalize();
    p.push_back(x);
  }
  return p;
}

Eigen::MatrixXcd localize(const ModuleSpec& spec, const Point& lambda) {
  double norm2 = 0;
  for (const auto& z : lambda) norm2 += std::norm(z);
  if (norm2 >= 1.0) throw InputError("localization point is not inside the unit ball");
  auto gens = spec.nonzero_generators();
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(gens.size()), static_cast<Eigen::Index>(spec.N));
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = 0; j < spec.N; ++j)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gens[i][j].evaluate(lambda);
  return A;
}

int numerical_rank(const Eigen::MatrixXcd& A, double tol) {
  if (A.size() == 0) return 0;
  Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXcd>(A).singularValues();
  if (s.size() == 0 || s[0] == 0) return 0;
  return static_cast<int>((s.array() > tol * s[0]).count());
}

ExactRank exact_rank(const std::vector<Rational>& entries, std::size_t rows, std::size_t cols) {
  std::vector<Rational> a = entries;
  std::vector<std::size_t> row_of(rows);
  std::iota(row_of.begin(), row_of.end(), 0);
  ExactRank out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a[piv * cols + j], a[r * cols + j]);
      std::swap(row_of[piv], row_of[r]);
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (a[i * cols + c] == 0) continue;
      Rational f = a[i * cols + c] / a[r * cols + c];
      for (std::size_t j = c; j < cols; ++j) a[i * cols + j] -= f * a[r * cols + j];
    }
    out.rows.push_back(row_of[r]);
    out.cols.push_back(c);
    ++r;
  }
  out.rank = static_cast<int>(r);
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

GenericRankResult exact_generic_rank(const PolyMatrix& m, std::uint32_t num_vars, Rng& rng, int points) {
  GenericRankResult best;
  best.rank = -1;
  if (m.rows() == 0 || m.cols() == 0) {
    best.rank = 0;
    best.exact_confirmed = true;
    best.minor_determinant = Polynomial(1L);
    return best;
  }
  num_vars = std::max({num_vars, m.max_variable(), 1u});
  for (int p = 0; p < points; ++p) {
    auto pt = random_rational_point(rng, num_vars);
    auto er = exact_rank(m.evaluate(std::span<const Rational>(pt)), m.rows(), m.cols());
    if (er.rank > best.rank) {
      best.rank = er.rank;
      best.minor_rows = er.rows;
      best.minor_cols = er.cols;
    }
    if (best.rank == static_cast<int>(std::min(m.rows(), m.cols()))) break;
  }
  // A minor that is nonzero at a point has a nonzero determinant polynomial.
  best.minor_determinant = determinant(m.submatrix(best.minor_rows, best.minor_cols));
  best.exact_confirmed = best.rank == 0 || !best.minor_determinant.is_zero();
  return best;
}

GenericRankResult generic_rank(const PolyMatrix& m, std::uint32_t num_vars, Rng& rng, const GenericRankOptions& opts) {
  if (opts.trials < 1) throw InputError("trials must be at least 1");
  GenericRankResult res;
  if (m.rows() == 0 || m.cols() == 0) {
    res.confident = true;
    res.exact_confirmed = true;
    res.minor_determinant = Polynomial(1L);
    return res;
  }
  num_vars = std::max({num_vars, m.max_variable(), 1u});
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  auto sample = [&](int count) {
    // Points are drawn serially so the stream does not depend on threads.
    std::vector<Point> pts;
    for (int k = 0; k < count; ++k) pts.push_back(random_ball_point(rng, num_vars));
    std::vector<int> ranks(pts.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(pts.size()); ++k) {
      auto vals = m.evaluate(std::span<const std::complex<double>>(pts[static_cast<std::size_t>(k)]));
      Eigen::MatrixXcd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[i * cols + j];
      ranks[static_cast<std::size_t>(k)] = numerical_rank(A, opts.tol);
    }
    res.sampled_ranks.insert(res.sampled_ranks.end(), ranks.begin(), ranks.end());
  };

  sample(opts.trials);
  auto summarize = [&] {
    res.trials_used = static_cast<int>(res.sampled_ranks.size());
    res.rank = *std::max_element(res.sampled_ranks.begin(), res.sampled_ranks.end());
    auto hits = std::count(res.sampled_ranks.begin(), res.sampled_ranks.end(), res.rank);
    res.attainment = static_cast<double>(hits) / res.trials_used;
    res.confident = hits >= (res.trials_used + 1) / 2;
  };
  summarize();
  while (!res.confident && res.trials_used < opts.max_trials) {
    sample(std::min(res.trials_used, opts.max_trials - res.trials_used));
    summarize();
  }

  if (opts.exact_confirm || !res.confident) {
    GenericRankResult ex = exact_generic_rank(m, num_vars, rng);
    if (ex.exact_confirmed && ex.rank >= res.rank) {
      res.rank = ex.rank;
      res.exact_confirmed = true;
      res.confident = true;
      res.minor_rows = ex.minor_rows;
      res.minor_cols = ex.minor_cols;
      res.minor_determinant = ex.minor_determinant;
    }
  }
  return res;
}

GenericRankResult fiber_dimension(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts) {
  spec.validate();
  return generic_rank(spec.generator_matrix(), spec.num_vars(), rng, opts);
}

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Next k-subset of {0..n-1} in lexicographic order; false after the last one.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> set_minus(std::size_t n, const std::vector<std::size_t>& remove) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(remove.begin(), remove.end(), i) == remove.end()) out.push_back(i);
  return out;
}

}  // namespace

IndependentSubset independent_subset(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts) {
  GenericRankOptions confirm = opts;
  confirm.exact_confirm = true;
  auto fdres = fiber_dimension(spec, rng, confirm);
  IndependentSubset out;
  out.fd = fdres.rank;
  PolyMatrix G = spec.generator_matrix();
  const auto k = static_cast<std::size_t>(out.fd);
  std::vector<std::size_t> comb = all_indices(k);
  do {
    auto sub = G.submatrix(all_indices(G.rows()), comb);
    auto r = exact_generic_rank(sub, spec.num_vars(), rng);
    if (r.rank == out.fd) {
      out.complement = comb;
      out.subset = set_minus(spec.N, comb);
      return out;
    }
  } while (k > 0 && next_combination(comb, spec.N));
  throw InconsistencyError("no coordinate subset carries the fiber dimension " + std::to_string(out.fd));
}

DependenceCertificate dependence_certificate(const ModuleSpec& spec, const std::vector<std::size_t>& W_in,
                                             Rng& rng, const GenericRankOptions& opts) {
  spec.validate();
  DependenceCertificate cert;
  cert.subset = W_in;
  std::sort(cert.subset.begin(), cert.subset.end());
  const auto& W = cert.subset;
  for (std::size_t w : W)
    if (w >= spec.N) throw InputError("certificate subset index out of range");
  if (std::adjacent_find(W.begin(), W.end()) != W.end()) throw InputError("certificate subset has repeated indices");

  GenericRankOptions confirm = opts;
  confirm.exact_confirm = true;
  auto fdres = fiber_dimension(spec, rng, confirm);
  const int fd = fdres.rank;
  if (static_cast<int>(W.size()) != static_cast<int>(spec.N) - fd + 1) {
    throw InputError("certificate subset must have N - fd + 1 = " + std::to_string(spec.N - fd + 1) +
                     " elements, got " + std::to_string(W.size()));
  }
  const auto l = static_cast<std::size_t>(fd);

  // Greedy generator family with a nonvanishing l x l minor.
  std::vector<std::size_t> family;  // indices into spec.generators
  std::vector<VectorPolynomial> rows;
  for (std::size_t g = 0; g < spec.generators.size() && family.size() < l; ++g) {
    if (spec.generators[g].is_zero()) continue;
    auto trial = rows;
    trial.push_back(spec.generators[g]);
    auto r = exact_generic_rank(PolyMatrix::from_rows(trial), spec.num_vars(), rng);
    if (r.exact_confirmed && r.rank == static_cast<int>(trial.size())) {
      rows = std::move(trial);
      family.push_back(g);
    }
  }
  if (family.size() < l) {
    cert.reason = "no generator subfamily with a nonvanishing " + std::to_string(l) + "x" + std::to_string(l) +
                  " minor was found";
    return cert;
  }
  PolyMatrix P = PolyMatrix::from_rows(rows);
  const std::vector<std::size_t> v = set_minus(spec.N, W);
  const std::vector<std::size_t> all_rows = all_indices(l);

  // C^{(k)} = [p_{., k} | p_{., v}]; its first-column cofactors do not depend on k.
  std::vector<std::size_t> ck_cols{W.front()};
  ck_cols.insert(ck_cols.end(), v.begin(), v.end());
  PolyMatrix C = P.submatrix(all_rows, ck_cols);
  std::vector<Polynomial> r(l);
  for (std::size_t i = 0; i < l; ++i) r[i] = cofactor(C, i, 0);

  auto i0 = std::find_if(r.begin(), r.end(), [](const Polynomial& p) { return p.is_zero(); });
  if (i0 == r.end()) {
    cert.construction_case = 2;
    for (std::size_t i = 0; i < l; ++i) cert.combination.emplace_back(family[i], r[i]);
  } else {
    cert.construction_case = 1;
    const auto skip = static_cast<std::size_t>(i0 - r.begin());
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < l; ++i)
      if (i != skip) others.push_back(i);
    // Left kernel vector of A = P[others, v] from signed maximal minors.
    PolyMatrix A = P.submatrix(others, v);
    auto ar = exact_generic_rank(A, spec.num_vars(), rng);
    std::vector<std::size_t> R = ar.rank > 0 ? ar.minor_rows : std::vector<std::size_t>{};
    std::vector<std::size_t> K = ar.rank > 0 ? ar.minor_cols : std::vector<std::size_t>{};
    std::size_t extra = 0;
    while (std::find(R.begin(), R.end(), extra) != R.end()) ++extra;
    std::vector<std::size_t> U = R;
    U.push_back(extra);
    std::sort(U.begin(), U.end());
    for (std::size_t p = 0; p < U.size(); ++p) {
      std::vector<std::size_t> rest;
      for (std::size_t q = 0; q < U.size(); ++q)
        if (q != p) rest.push_back(U[q]);
      Polynomial q = determinant(A.submatrix(rest, K));
      if (p % 2) q = -q;
      if (!q.is_zero()) cert.combination.emplace_back(family[others[U[p]]], q);
    }
  }

  cert.witness = VectorPolynomial(spec.N);
  for (const auto& [g, q] : cert.combination) cert.witness += q * spec.generators[g];
  cert.available = verify_certificate_exact(spec, cert);
  if (!cert.available) cert.reason = "exact verification failed; the detected ranks were not generic";
  return cert;
}

bool verify_certificate_exact(const ModuleSpec& spec, const DependenceCertificate& c) {
  VectorPolynomial sum(spec.N);
  for (const auto& [g, q] : c.combination) {
    if (g >= spec.generators.size()) return false;
    sum += q * spec.generators[g];
  }
  auto& cert = const_cast<DependenceCertificate&>(c);
  cert.combination_check = sum == c.witness;
  cert.nonzero_check = !c.witness.is_zero();
  cert.support_check = true;
  for (std::size_t j : c.witness.support())
    if (!std::binary_search(c.subset.begin(), c.subset.end(), j)) cert.support_check = false;
  return cert.combination_check && cert.nonzero_check && cert.support_check;
}

double certificate_quotient_residual(const ModuleSpec& spec, const DependenceCertificate& cert) {
  int deg = std::max(cert.witness.degree(), spec.max_degree());
  for (const auto& [g, q] : cert.combination) deg = std::max(deg, q.degree() + spec.generators[g].degree());
  const std::uint32_t m = std::max({spec.num_vars(), cert.witness.max_variable(), 1u});
  FockTruncation t(m, static_cast<std::uint32_t>(deg + 1), spec.N);
  SubmoduleOptions opts;
  opts.build_complement = false;
  SubmoduleTruncation sub(spec, t, opts);
  Eigen::VectorXd x = t.coordinates(cert.witness);
  double res2 = 0;
  for (const auto& s : sub.slices()) {
    Eigen::VectorXd xs(static_cast<Eigen::Index>(s.basis.size()));
    for (std::size_t l = 0; l < s.basis.size(); ++l)
      xs[static_cast<Eigen::Index>(l)] = x[static_cast<Eigen::Index>(s.basis[l])];
    if (s.sub.cols() > 0) xs -= s.sub * (s.sub.transpose() * xs);
    res2 += xs.squaredNorm();
  }
  return std::sqrt(res2);
}

std::vector<VectorPolynomial> kernel_basis(const PolyMatrix& m, const GenericRankResult& rank) {
  if (!rank.exact_confirmed) throw InputError("kernel basis needs an exactly confirmed rank");
  const std::size_t N = m.cols();
  const auto& R = rank.minor_rows;
  const auto& C = rank.minor_cols;
  std::vector<VectorPolynomial> out;
  for (std::size_t c = 0; c < N; ++c) {
    if (std::find(C.begin(), C.end(), c) != C.end()) continue;
    std::vector<std::size_t> U = C;
    U.push_back(c);
    std::sort(U.begin(), U.end());
    VectorPolynomial a(N);
    for (std::size_t p = 0; p < U.size(); ++p) {
      std::vector<std::size_t> rest;
      for (std::size_t q = 0; q < U.size(); ++q)
        if (q != p) rest.push_back(U[q]);
      Polynomial d = R.empty() ? Polynomial(1L) : determinant(m.submatrix(R, rest));
      a[U[p]] = (p % 2) ? -d : d;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      Polynomial dot;
      for (std::size_t j = 0; j < N; ++j) dot += m(i, j) * a[j];
      if (!dot.is_zero()) throw InconsistencyError("kernel vector check failed; rank was underestimated");
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace dacurv
