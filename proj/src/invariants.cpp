#include "dacurv/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <tuple>

#include "dacurv/errors.hpp"
#include "dacurv/fock.hpp"
#include "dacurv/kernels.hpp"
#include "dacurv/submodule.hpp"

namespace dacurv {

Rational q_poly(int m, long x) {
  if (m < 0 || x < 0) throw InputError("q_m(x) needs m >= 0 and x >= 0");
  Rational v(1);
  for (int j = 1; j <= m; ++j) {
    v *= Rational(x + j, j);
    v.canonicalize();
  }
  return v;
}

ClosedFormCurvature curvature_closed_form(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts) {
  ClosedFormCurvature out;
  out.fd = fiber_dimension(spec, rng, opts);
  out.K = static_cast<int>(spec.N) - out.fd.rank;
  return out;
}

namespace {

// Truncation cutoff on which degrees <= n of the quotient are exact.
int exact_cutoff(const ModuleSpec& spec, const std::optional<Grading>& g, int n) {
  if (g) return std::max(n + g->max_shift(), spec.max_degree());
  return std::max(n, spec.max_degree()) + 2;
}

// Least-squares weights w with a = w . y for the intercept of y ~ basis(x).
Eigen::VectorXd intercept_weights(const Eigen::MatrixXd& design) {
  Eigen::MatrixXd pinv = design.completeOrthogonalDecomposition().pseudoInverse();
  return pinv.row(0).transpose();
}

// Columns 1, s, s log s, s^2 (and s^2 log s when extended) in s = 1 - r^2.
// A tail h_k ~ A + C/k + ... of the radial series produces exactly these
// singular terms as r -> 1.
Eigen::MatrixXd radial_design(const std::vector<double>& r, bool extended) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(r.size()), extended ? 5 : 4);
  for (std::size_t k = 0; k < r.size(); ++k) {
    double s = 1 - r[k] * r[k];
    auto row = A.row(static_cast<Eigen::Index>(k));
    row(0) = 1;
    row(1) = s;
    row(2) = s * std::log(s);
    row(3) = s * s;
    if (extended) row(4) = s * s * std::log(s);
  }
  return A;
}

// sum_{k > K} x^k / k
double log_series_tail(double x, int K) {
  double sum = 0;
  double pw = std::pow(x, K + 1);
  for (int k = K + 1; pw > 1e-18 * std::max(sum, 1e-300); ++k) {
    sum += pw / k;
    pw *= x;
  }
  return sum;
}

// Flops of per-slice orthonormalization plus the sample products.
double curvature_work(std::uint32_t m, int cutoff, std::size_t N, int samples) {
  double total = 0;
  for (int w = 0; w <= cutoff; ++w) {
    double D = static_cast<double>(count_monomials(m, static_cast<std::uint32_t>(w)) -
                                   (w > 0 ? count_monomials(m, static_cast<std::uint32_t>(w - 1)) : 0)) *
               static_cast<double>(N);
    total += D * D * D + 2.0 * samples * D * D / static_cast<double>(N);
  }
  return total;
}

std::vector<Point> sphere_points(Rng& rng, std::uint32_t m, std::uint32_t total_vars, int count) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Point> pts;
  for (int s = 0; s < count; ++s) {
    Point p(total_vars, 0.0);
    double n2 = 0;
    for (std::uint32_t i = 0; i < m; ++i) {
      double re = g(rng);
      double im = g(rng);
      p[i] = {re, im};
      n2 += re * re + im * im;
    }
    for (std::uint32_t i = 0; i < m; ++i) p[i] /= std::sqrt(n2);
    pts.push_back(std::move(p));
  }
  return pts;
}

// vals(k, s) = conj(xi_s^alpha_k) / ||z^alpha_k|| for every monomial of t.
Eigen::MatrixXcd kernel_coordinates(const FockTruncation& t, const std::vector<Point>& pts, std::size_t begin,
                                    std::size_t end) {
  const auto B = static_cast<Eigen::Index>(end - begin);
  Eigen::MatrixXcd mono(static_cast<Eigen::Index>(t.num_monomials()), B);
  mono.row(0).setOnes();
  for (std::size_t k = 1; k < t.num_monomials(); ++k) {
    auto a = t.exponents(k);
    std::uint32_t i = 0;
    while (a[i] == 0) ++i;
    std::size_t src = t.shift_source(i + 1, k);
    for (Eigen::Index s = 0; s < B; ++s)
      mono(static_cast<Eigen::Index>(k), s) = mono(static_cast<Eigen::Index>(src), s) * pts[begin + static_cast<std::size_t>(s)][i];
  }
  for (std::size_t k = 0; k < t.num_monomials(); ++k)
    mono.row(static_cast<Eigen::Index>(k)) = mono.row(static_cast<Eigen::Index>(k)).conjugate() / t.norm(k);
  return mono;
}

}  // namespace

CurvatureEstimate curvature_by_integral(const ModuleSpec& spec, Rng& rng, const IntegralOptions& opts) {
  spec.validate();
  if (opts.sphere_samples < 1) throw InputError("sphere_samples must be at least 1");
  std::vector<double> grid = opts.r_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 6) throw InputError("the radial grid needs at least 6 radii");
  for (double r : grid)
    if (!(r > 0 && r < 1)) throw InputError("radii must lie in (0, 1)");

  const std::uint32_t m = opts.m_vars ? opts.m_vars : spec.num_vars();
  if (spec.kind == AmbientKind::Finite && m > spec.d) throw InputError("sphere variables exceed d");
  const std::uint32_t vars = std::max(m, spec.num_vars());
  const std::size_t N = spec.N;
  const auto grading = detect_grading(spec);

  CurvatureEstimate out;
  out.samples = opts.sphere_samples;
  out.approximate = !grading.has_value();

  int depth = 0;
  int cutoff = 0;
  if (grading) {
    const double r_max = grid.back();
    depth = opts.depth > 0 ? opts.depth : static_cast<int>(std::ceil(std::log(0.01) / (2 * std::log(r_max))));
    auto fits = [&](int K) {
      int C = std::max(K + grading->max_shift(), spec.max_degree());
      std::size_t size = count_monomials(vars, static_cast<std::uint32_t>(C));
      return size != kNoIndex && size * N <= opts.max_basis &&
             curvature_work(vars, C, N, opts.sphere_samples) <= opts.max_work;
    };
    while (depth > 4 && !fits(depth)) --depth;
    cutoff = std::max(depth + grading->max_shift(), spec.max_degree());
  } else {
    depth = std::max(opts.ungraded_cutoff, spec.max_degree());
    cutoff = depth;
  }
  out.depth = depth;

  for (double r : grid) {
    // The tail of the radial series beyond the depth must carry little weight.
    if (std::pow(r, 2.0 * (depth + 1)) > 0.05)
      out.r_dropped.push_back(r);
    else
      out.r_used.push_back(r);
  }
  if (out.r_used.size() < 6) {
    throw InputError("radial depth " + std::to_string(depth) +
                     " is too small for the radial grid; lower the radii or raise the depth budget");
  }

  FockTruncation t(vars, static_cast<std::uint32_t>(cutoff), N, std::max<std::size_t>(opts.max_basis, kDefaultSizeCap));
  SubmoduleOptions sopts;
  sopts.build_complement = false;
  sopts.exec = opts.exec;
  SubmoduleTruncation sub(spec, t, sopts);
  const auto& slices = sub.slices();

  const auto pts = sphere_points(rng, m, vars, opts.sphere_samples);
  const auto S = static_cast<std::size_t>(opts.sphere_samples);
  const std::size_t R = out.r_used.size();
  // profile(r, s) = (1 - r^2) trace F(r xi_s)
  Eigen::MatrixXd profile = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(S));
  std::vector<double> hsum(static_cast<std::size_t>(depth) + 1, 0.0);
  constexpr std::size_t kChunk = 64;

  for (std::size_t begin = 0; begin < S; begin += kChunk) {
    const std::size_t end = std::min(S, begin + kChunk);
    const auto B = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXcd vals = kernel_coordinates(t, pts, begin, end);

    if (grading) {
      // h(k, s) from each slice, reduced in slice order afterwards.
      std::vector<Eigen::MatrixXd> part(slices.size());
#pragma omp parallel for schedule(dynamic, 1) if (opts.exec == Exec::Parallel)
      for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(slices.size()); ++bb) {
        const Slice& sl = slices[static_cast<std::size_t>(bb)];
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), B);
        for (std::size_t c = 0; c < N; ++c) {
          int k = sl.weight - grading->shifts[c];
          if (k < 0 || k > depth) continue;
          std::vector<std::size_t> rows;
          for (std::size_t l = 0; l < sl.basis.size(); ++l)
            if (sl.basis[l] % N == c) rows.push_back(l);
          if (rows.empty()) continue;
          Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 2 * B);
          Eigen::MatrixXd Qc(static_cast<Eigen::Index>(rows.size()), sl.sub.cols());
          for (std::size_t q = 0; q < rows.size(); ++q) {
            auto mono = static_cast<Eigen::Index>(sl.basis[rows[q]] / N);
            X.row(static_cast<Eigen::Index>(q)) << vals.row(mono).real(), vals.row(mono).imag();
            Qc.row(static_cast<Eigen::Index>(q)) = sl.sub.row(static_cast<Eigen::Index>(rows[q]));
          }
          Eigen::RowVectorXd n2 = X.colwise().squaredNorm();
          if (Qc.cols() > 0) n2 -= (Qc.transpose() * X).colwise().squaredNorm();
          h.row(static_cast<Eigen::Index>(c)) = n2.head(B) + n2.tail(B);
        }
        part[static_cast<std::size_t>(bb)] = std::move(h);
      }
      Eigen::MatrixXd hk = Eigen::MatrixXd::Zero(depth + 1, B);
      for (std::size_t b = 0; b < slices.size(); ++b)
        for (std::size_t c = 0; c < N; ++c) {
          int k = slices[b].weight - grading->shifts[c];
          if (k >= 0 && k <= depth) hk.row(k) += part[b].row(static_cast<Eigen::Index>(c));
        }
      for (int k = 0; k <= depth; ++k) hsum[static_cast<std::size_t>(k)] += hk.row(k).sum();
      for (std::size_t ri = 0; ri < R; ++ri) {
        const double r2 = out.r_used[ri] * out.r_used[ri];
        const double tail = log_series_tail(r2, depth);
        for (Eigen::Index s = 0; s < B; ++s) {
          double acc = 0;
          double pw = 1;
          for (int k = 0; k <= depth; ++k) {
            acc += pw * hk(k, s);
            pw *= r2;
          }
          // Terms past the depth follow h_k = A + C/k fitted at k = depth/2 and depth.
          const int half = std::max(1, depth / 2);
          double C = 0;
          if (depth > half) C = (hk(half, s) - hk(depth, s)) / (1.0 / half - 1.0 / depth);
          double A = hk(depth, s) - C / std::max(depth, 1);
          profile(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(begin) + s) =
              (1 - r2) * acc + pw * A + (1 - r2) * C * tail;
        }
      }
    } else {
      // One slice: form the truncated kernel vector for each radius directly.
      const Slice& sl = slices[0];
      const auto D = static_cast<Eigen::Index>(sl.basis.size());
      for (std::size_t ri = 0; ri < R; ++ri) {
        const double r = out.r_used[ri];
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(D, 2 * B * static_cast<Eigen::Index>(N));
        for (Eigen::Index l = 0; l < D; ++l) {
          std::size_t g = sl.basis[static_cast<std::size_t>(l)];
          auto mono = static_cast<Eigen::Index>(g / N);
          auto c = static_cast<Eigen::Index>(g % N);
          double scale = std::pow(r, t.degree(static_cast<std::size_t>(mono)));
          X.row(l).segment(c * 2 * B, B) = scale * vals.row(mono).real();
          X.row(l).segment(c * 2 * B + B, B) = scale * vals.row(mono).imag();
        }
        Eigen::RowVectorXd n2 = X.colwise().squaredNorm();
        if (sl.sub.cols() > 0) n2 -= (sl.sub.transpose() * X).colwise().squaredNorm();
        for (Eigen::Index s = 0; s < B; ++s) {
          double tr = 0;
          for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(N); ++c) tr += n2[c * 2 * B + s] + n2[c * 2 * B + B + s];
          profile(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(begin) + s) = (1 - r * r) * tr;
        }
      }
    }
  }

  if (grading) {
    out.mean_h.resize(hsum.size());
    for (std::size_t k = 0; k < hsum.size(); ++k) out.mean_h[k] = hsum[k] / static_cast<double>(S);
  }
  Eigen::VectorXd mean = profile.rowwise().mean();
  out.mean_profile.assign(mean.data(), mean.data() + mean.size());

  Eigen::MatrixXd A = radial_design(out.r_used, true);
  Eigen::VectorXd w = intercept_weights(A);
  Eigen::VectorXd a = profile.transpose() * w;  // per-sample intercepts
  out.estimate = a.mean();
  if (S > 1) {
    double var = (a.array() - out.estimate).square().sum() / static_cast<double>(S - 1);
    out.std_error = std::sqrt(var / static_cast<double>(S));
  }
  // Model error: the change when the last singular term is left out.
  double a2 = mean.dot(intercept_weights(radial_design(out.r_used, false)));
  out.systematic = std::abs(a2 - out.estimate);
  out.uncertainty = std::hypot(out.std_error, out.systematic);
  Eigen::VectorXd coef = A.completeOrthogonalDecomposition().solve(mean);
  out.extrapolation_residual = std::sqrt((A * coef - mean).squaredNorm() / static_cast<double>(R));
  return out;
}

ModuleRankEuler euler_char_module_rank(const ModuleSpec& spec, Rng& rng, const GenericRankOptions& opts) {
  ModuleRankEuler out;
  out.subset = independent_subset(spec, rng, opts);
  out.chi = static_cast<int>(out.subset.subset.size());
  if (out.subset.fd == 0) return out;
  // W = S' plus the smallest coordinate outside it.
  std::vector<std::size_t> W = out.subset.subset;
  std::size_t extra = 0;
  while (std::find(W.begin(), W.end(), extra) != W.end()) ++extra;
  W.push_back(extra);
  std::sort(W.begin(), W.end());
  out.certificate = dependence_certificate(spec, W, rng, opts);
  if (out.certificate->available) out.certificate_residual = certificate_quotient_residual(spec, *out.certificate);
  return out;
}

namespace {

void finish_growth(HilbertEuler& h, std::uint32_t d) {
  h.differences.clear();
  for (std::size_t k = d; k < h.dims.size(); ++k) {
    long diff = 0;
    long binom = 1;
    for (std::uint32_t j = 0; j <= d; ++j) {
      long term = binom * h.dims[k - j];
      diff += (j % 2) ? -term : term;
      binom = binom * static_cast<long>(d - j) / static_cast<long>(j + 1);
    }
    h.differences.push_back(diff);
  }
  if (h.differences.empty()) return;
  h.chi = static_cast<int>(h.differences.back());
  std::size_t first = h.differences.size() - 1;
  while (first > 0 && h.differences[first - 1] == h.differences.back()) --first;
  h.stabilized = h.differences.size() - first >= 3;
  if (h.stabilized) h.stabilization_degree = static_cast<int>(first + d);
}

struct QuotientSetup {
  std::optional<Grading> grading;
  std::unique_ptr<FockTruncation> t;
  std::unique_ptr<SubmoduleTruncation> sub;
  int cutoff = 0;
};

QuotientSetup make_quotient(const ModuleSpec& spec, std::uint32_t vars, int n, Exec exec) {
  QuotientSetup q;
  q.grading = detect_grading(spec);
  q.cutoff = exact_cutoff(spec, q.grading, n);
  q.t = std::make_unique<FockTruncation>(vars, static_cast<std::uint32_t>(q.cutoff), spec.N);
  SubmoduleOptions so;
  so.exec = exec;
  q.sub = std::make_unique<SubmoduleTruncation>(spec, *q.t, so);
  return q;
}

std::uint32_t quotient_vars(const ModuleSpec& spec, std::uint32_t m) {
  if (spec.kind == AmbientKind::Finite) {
    if (m > spec.d) throw InputError("m = " + std::to_string(m) + " exceeds d = " + std::to_string(spec.d));
    return spec.d;
  }
  return std::max(m, spec.num_vars());
}

}  // namespace

HilbertEuler euler_char_hilbert_growth(const ModuleSpec& spec, int max_degree, Exec exec) {
  spec.validate();
  if (max_degree < 0) throw InputError("negative degree");
  const std::uint32_t d = spec.num_vars();
  auto q = make_quotient(spec, d, max_degree, exec);
  HilbertEuler h;
  h.cutoff = q.cutoff;
  h.approximate = !q.grading;
  for (int k = 0; k <= max_degree; ++k)
    h.dims.push_back(static_cast<long>(enumerated_quotient_dim(*q.sub, d, k, std::sqrt(kOpRankTol))));
  finish_growth(h, d);
  return h;
}

HilbertEuler euler_char_oprank(const ModuleSpec& spec, int max_degree, Exec exec) {
  spec.validate();
  if (max_degree < 0) throw InputError("negative degree");
  const std::uint32_t d = spec.num_vars();
  auto q = make_quotient(spec, d, max_degree, exec);
  HilbertEuler h;
  h.cutoff = q.cutoff;
  h.approximate = !q.grading;
  CompressedShifts T(*q.sub, d, exec);
  QuotientOperator X = quotient_defect_squared(*q.sub);
  QuotientOperator sum = X;
  for (int k = 0; k <= max_degree; ++k) {
    if (k > 0) {
      X = T.phi(X, exec);
      sum += X;
    }
    h.dims.push_back(static_cast<long>(sum.rank(kOpRankTol)));
  }
  finish_growth(h, d);
  return h;
}

OpRankResult dim_via_oprank(const ModuleSpec& spec, std::uint32_t m_vars, int n, Exec exec) {
  spec.validate();
  if (n < 0) throw InputError("negative degree");
  if (m_vars == 0) throw InputError("m must be at least 1");
  const std::uint32_t vars = quotient_vars(spec, m_vars);
  auto q = make_quotient(spec, vars, n, exec);
  OpRankResult out;
  out.cutoff = q.cutoff;
  out.approximate = !q.grading;
  CompressedShifts T(*q.sub, m_vars, exec);
  QuotientOperator X = quotient_defect_squared(*q.sub);
  QuotientOperator sum = X;
  for (int k = 1; k <= n; ++k) {
    X = T.phi(X, exec);
    sum += X;
  }
  if (q.grading && sum.contaminated) {
    throw InputError("sum of phi iterates reaches past the exact zone; raise the cutoff above " +
                     std::to_string(q.cutoff));
  }
  out.oprank = static_cast<int>(sum.rank(kOpRankTol));
  out.enumerated = static_cast<int>(enumerated_quotient_dim(*q.sub, m_vars, n, std::sqrt(kOpRankTol)));
  return out;
}

TraceEstimate K_trace_estimate(const ModuleSpec& spec, std::uint32_t m_vars, const std::vector<int>& n_grid,
                               Exec exec) {
  spec.validate();
  if (m_vars == 0) throw InputError("m must be at least 1");
  TraceEstimate out;
  out.n_grid = n_grid;
  std::sort(out.n_grid.begin(), out.n_grid.end());
  out.n_grid.erase(std::unique(out.n_grid.begin(), out.n_grid.end()), out.n_grid.end());
  if (out.n_grid.size() < 2 || out.n_grid.front() < 1) throw InputError("trace grid needs two degrees >= 1");
  const int top = out.n_grid.back();
  const std::uint32_t vars = quotient_vars(spec, m_vars);
  auto q = make_quotient(spec, vars, top, exec);
  out.cutoff = q.cutoff;
  out.approximate = !q.grading;
  CompressedShifts T(*q.sub, m_vars, exec);
  QuotientOperator X = quotient_defect_squared(*q.sub);
  double cumulative = X.trace();
  std::size_t next = 0;
  for (int k = 1; k <= top; ++k) {
    X = T.phi(X, exec);
    cumulative += X.trace();
    if (k == out.n_grid[next]) {
      out.cumulative_ratio.push_back(cumulative / q_poly(static_cast<int>(m_vars), k).get_d());
      out.last_ratio.push_back(X.trace() / q_poly(static_cast<int>(m_vars) - 1, k).get_d());
      ++next;
    }
  }
  // a + b/n, plus c/n^2 when the grid allows; the spread between the two
  // orders is part of the uncertainty.
  auto fit = [&](int terms) {
    const auto rows = static_cast<Eigen::Index>(out.n_grid.size());
    Eigen::MatrixXd A(rows, terms);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      double inv = 1.0 / out.n_grid[static_cast<std::size_t>(i)];
      for (int j = 0; j < terms; ++j) A(i, j) = std::pow(inv, j);
      y[i] = out.cumulative_ratio[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    return std::make_tuple(c, std::sqrt((A * c - y).squaredNorm() / static_cast<double>(rows)));
  };
  const int terms = out.n_grid.size() >= 4 ? 3 : 2;
  auto [coef, residual] = fit(terms);
  out.estimate = coef[0];
  out.slope = coef[1];
  out.fit_residual = residual;
  out.uncertainty = residual;
  if (terms == 3) out.uncertainty = std::hypot(residual, std::get<0>(fit(2))[0] - out.estimate);
  return out;
}

namespace {

// Arithmetic modulo the Mersenne prime 2^61 - 1.
constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 x = static_cast<unsigned __int128>(a) * b;
  std::uint64_t v = static_cast<std::uint64_t>(x & kPrime) + static_cast<std::uint64_t>(x >> 61);
  return v >= kPrime ? v - kPrime : v;
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mul_mod(a, a))
    if (e & 1) r = mul_mod(r, a);
  return r;
}

std::uint64_t to_mod(const mpz_class& z) {
  mpz_class r = z % mpz_class(std::to_string(kPrime));
  if (r < 0) r += mpz_class(std::to_string(kPrime));
  return std::stoull(r.get_str());
}

std::uint64_t to_mod(const Rational& q) {
  std::uint64_t den = to_mod(q.get_den());
  if (den == 0) throw InconsistencyError("denominator vanishes modulo the working prime");
  return mul_mod(to_mod(q.get_num()), pow_mod(den, kPrime - 2));
}

// Polynomials in y = z_{m+1}, ..., z_V with coefficients mod p, obtained by
// substituting z_1..z_m = lambda.
using ModPoly = std::map<ExponentVector, std::uint64_t, GrlexLess>;

ModPoly specialize(const Polynomial& f, std::uint32_t m, const std::vector<std::uint64_t>& lambda) {
  ModPoly out;
  for (const auto& [e, c] : f.terms()) {
    std::uint64_t v = to_mod(c);
    std::vector<ExponentVector::Entry> high;
    for (const auto& [var, k] : e.entries()) {
      if (var <= m) v = mul_mod(v, pow_mod(lambda[var - 1], k));
      else high.emplace_back(var, k);
    }
    auto& slot = out[ExponentVector::from_entries(high)];
    slot = (slot + v) % kPrime;
  }
  return out;
}

// Monomials in the variables lo..hi of total degree <= D.
std::vector<ExponentVector> monomials_up_to(std::uint32_t lo, std::uint32_t hi, int D) {
  std::vector<ExponentVector> out{ExponentVector()};
  for (std::uint32_t v = lo; v <= hi; ++v) {
    std::vector<ExponentVector> next;
    for (const auto& e : out)
      for (int k = 0; k + static_cast<int>(e.total_degree()) <= D; ++k)
        next.push_back(k == 0 ? e : e * ExponentVector::variable(v, static_cast<std::uint32_t>(k)));
    out = std::move(next);
  }
  return out;
}

// Row echelon form mod p with the columns in the given order; returns the
// number of pivots found among the first `split` columns and the total.
std::pair<int, int> pivot_counts(std::vector<std::vector<std::uint64_t>> rows, std::size_t cols, std::size_t split) {
  int r = 0;
  int before_split = 0;
  for (std::size_t c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
    std::size_t piv = static_cast<std::size_t>(r);
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[static_cast<std::size_t>(r)]);
    auto& pr = rows[static_cast<std::size_t>(r)];
    const std::uint64_t inv = pow_mod(pr[c], kPrime - 2);
    for (std::size_t i = static_cast<std::size_t>(r) + 1; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      const std::uint64_t f = kPrime - mul_mod(rows[i][c], inv);
      for (std::size_t k = c; k < cols; ++k)
        if (pr[k]) rows[i][k] = (rows[i][k] + mul_mod(f, pr[k])) % kPrime;
    }
    ++r;
    if (c < split) ++before_split;
  }
  return {before_split, r};
}

// Column (monomial in y, coordinate), ordered so the constant monomials come last.
using Column = std::pair<ExponentVector, std::size_t>;
struct ColumnLess {
  bool operator()(const Column& a, const Column& b) const {
    const bool ca = a.first.is_constant();
    const bool cb = b.first.is_constant();
    if (ca != cb) return cb;
    auto o = grlex_compare(a.first, b.first);
    return o != 0 ? o < 0 : a.second < b.second;
  }
};

// Generic ranks over Frac(P_m) of the multiplier matrix of degree D: all
// columns, and the columns of nonconstant monomials in y alone.
std::pair<int, int> macaulay_ranks(const PolyMatrix& G, std::uint32_t m, std::uint32_t V,
                                   const std::vector<std::uint64_t>& lambda, int D) {
  const std::size_t N = G.cols();
  std::vector<std::vector<ModPoly>> gens(G.rows(), std::vector<ModPoly>(N));
  for (std::size_t i = 0; i < G.rows(); ++i)
    for (std::size_t j = 0; j < N; ++j) gens[i][j] = specialize(G(i, j), m, lambda);
  const auto shifts = monomials_up_to(m + 1, V, D);
  std::vector<std::map<Column, std::uint64_t, ColumnLess>> sparse;
  std::map<Column, std::size_t, ColumnLess> index;
  for (const auto& row : gens)
    for (const auto& s : shifts) {
      auto& out = sparse.emplace_back();
      for (std::size_t j = 0; j < N; ++j)
        for (const auto& [e, c] : row[j])
          if (c) out[{e * s, j}] = c;
      for (const auto& [key, c] : out) index.emplace(key, 0);
    }
  std::size_t split = 0;
  std::size_t c = 0;
  for (auto& [key, pos] : index) {
    pos = c++;
    if (!key.first.is_constant()) split = c;
  }
  std::vector<std::vector<std::uint64_t>> dense(sparse.size(), std::vector<std::uint64_t>(index.size(), 0));
  for (std::size_t r = 0; r < sparse.size(); ++r)
    for (const auto& [key, v] : sparse[r]) dense[r][index.at(key)] = v;
  auto [nc, all] = pivot_counts(std::move(dense), index.size(), split);
  return {all, nc};
}

// dim over Frac(P_m) of the constant vectors in the module generated by G
// over P_infinity, localized at P_m \ {0}. With y = z_{m+1..V} this is the
// dimension of the constant part of the C(z_1..z_m)[y]-module generated by
// the rows, read off from multiplier matrices of growing degree at random
// points lambda of z_1..z_m.
int constant_part_dimension(const PolyMatrix& G, std::uint32_t m, int full_rank, Rng& rng) {
  const std::uint32_t V = G.max_variable();
  if (V <= m) return full_rank;
  const int deg = std::max(1, G.degree());
  const int d_max = std::max(4, 2 * deg + 2);
  constexpr double kMaxEntries = 4e7;
  std::uniform_int_distribution<std::uint64_t> pick(1, kPrime - 1);
  std::vector<std::vector<std::uint64_t>> points(2);
  for (auto& pt : points)
    for (std::uint32_t k = 0; k < m; ++k) pt.push_back(pick(rng));
  int best = 0;
  for (int D = 0; D <= d_max; ++D) {
    const double shifts = static_cast<double>(monomials_up_to(m + 1, V, D).size());
    const double cols = static_cast<double>(G.cols()) * static_cast<double>(monomials_up_to(m + 1, V, D + deg).size());
    if (D > 0 && shifts * static_cast<double>(G.rows()) * cols > kMaxEntries) break;
    int all = 0;
    int nc = 0;
    for (const auto& pt : points) {
      auto [a, n] = macaulay_ranks(G, m, V, pt, D);
      all = std::max(all, a);
      nc = std::max(nc, n);
    }
    best = std::max(best, all - nc);
    if (best >= full_rank) break;
  }
  return best;
}

}  // namespace

void finalize_asymptotic(AsymptoticReport& r) {
  r.K_monotone = r.chi_monotone = r.K_le_chi = true;
  std::string problem;
  for (std::size_t i = 0; i < r.m_values.size(); ++i) {
    if (r.K_m[i] > r.chi_m[i]) r.K_le_chi = false;
    if (i == 0) continue;
    if (r.K_m[i] > r.K_m[i - 1]) {
      r.K_monotone = false;
      problem = "K_m increases from m = " + std::to_string(r.m_values[i - 1]) + " (" + std::to_string(r.K_m[i - 1]) +
                ") to m = " + std::to_string(r.m_values[i]) + " (" + std::to_string(r.K_m[i]) + ")";
    }
    if (r.chi_m[i] > r.chi_m[i - 1]) {
      r.chi_monotone = false;
      problem = "chi_m increases from m = " + std::to_string(r.m_values[i - 1]) + " (" +
                std::to_string(r.chi_m[i - 1]) + ") to m = " + std::to_string(r.m_values[i]) + " (" +
                std::to_string(r.chi_m[i]) + ")";
    }
  }
  auto limit = [](const std::vector<int>& v) -> std::optional<int> {
    if (v.size() < 3) return std::nullopt;
    auto n = v.size();
    if (v[n - 1] == v[n - 2] && v[n - 2] == v[n - 3]) return v.back();
    return std::nullopt;
  };
  r.K_limit = limit(r.K_m);
  r.chi_limit = limit(r.chi_m);
  if (!problem.empty()) throw InconsistencyError(problem);
  if (!r.K_le_chi) throw InconsistencyError("K_m exceeds chi_m");
}

AsymptoticReport asymptotic_sequences(const ModuleSpec& spec, const std::vector<int>& m_values, Rng& rng,
                                      const GenericRankOptions& opts) {
  spec.validate();
  AsymptoticReport r;
  r.m_values = m_values;
  if (m_values.empty()) throw InputError("empty m range");
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    if (m_values[i] < 1) throw InputError("m values must be positive");
    if (i > 0 && m_values[i] <= m_values[i - 1]) throw InputError("m values must increase");
    if (spec.kind == AmbientKind::Finite && static_cast<std::uint32_t>(m_values[i]) > spec.d)
      throw InputError("m = " + std::to_string(m_values[i]) + " exceeds d = " + std::to_string(spec.d));
  }
  GenericRankOptions exact = opts;
  exact.exact_confirm = true;
  const PolyMatrix G = spec.generator_matrix();
  const auto full = generic_rank(G, spec.num_vars(), rng, exact);
  if (!full.exact_confirmed) throw InconsistencyError("generic rank of the generators could not be confirmed");
  const int N = static_cast<int>(spec.N);
  for (int m : m_values) {
    auto um = static_cast<std::uint32_t>(m);
    r.K_m.push_back(N - generic_rank(G.restrict_to(um), um, rng, exact).rank);
    r.chi_m.push_back(N - constant_part_dimension(G, um, full.rank, rng));
  }
  finalize_asymptotic(r);
  return r;
}

GbcReport gbc_check(const ModuleSpec& spec, Rng& rng, const GbcOptions& opts) {
  spec.validate();
  GbcReport rep;
  rep.N = static_cast<int>(spec.N);
  const std::uint32_t d = spec.num_vars();
  GenericRankOptions exact = opts.rank;
  exact.exact_confirm = true;

  auto closed = curvature_closed_form(spec, rng, exact);
  rep.fd = closed.fd.rank;
  rep.K_closed = closed.K;
  rep.module_rank = euler_char_module_rank(spec, rng, exact);
  rep.chi_rank = rep.module_rank.chi;
  auto fail = [&](std::string s) { rep.failures.push_back(std::move(s)); };
  if (rep.K_closed != rep.chi_rank)
    fail("K_closed = " + std::to_string(rep.K_closed) + " vs chi_rank = " + std::to_string(rep.chi_rank));
  if (rep.module_rank.certificate) {
    const auto& c = *rep.module_rank.certificate;
    if (!c.available)
      fail("dependence certificate unavailable: " + c.reason);
    else if (rep.module_rank.certificate_residual > 1e-8)
      fail("certificate quotient relation has norm " + std::to_string(rep.module_rank.certificate_residual));
  }

  int hdeg = opts.hilbert_degree;
  if (hdeg <= 0) hdeg = std::max(8, static_cast<int>(d) + spec.max_degree() + 4);
  rep.hilbert = euler_char_hilbert_growth(spec, hdeg, opts.integral.exec);
  rep.oprank = euler_char_oprank(spec, hdeg, opts.integral.exec);
  for (const auto* h : {&rep.hilbert, &rep.oprank}) {
    const char* name = h == &rep.hilbert ? "chi_hilbert" : "chi_oprank";
    if (!h->stabilized)
      fail(std::string(name) + " did not stabilize by degree " + std::to_string(hdeg));
    else if (h->chi != rep.chi_rank)
      fail(std::string(name) + " = " + std::to_string(h->chi) + " vs chi_rank = " + std::to_string(rep.chi_rank));
  }
  if (rep.hilbert.dims != rep.oprank.dims) fail("enumerated dimensions differ from operator ranks");

  if (opts.run_integral) {
    rep.integral = curvature_by_integral(spec, rng, opts.integral);
    double tol = std::max(0.1, 3 * rep.integral->uncertainty);
    if (std::abs(rep.integral->estimate - rep.K_closed) > tol)
      fail("K_integral = " + std::to_string(rep.integral->estimate) + " vs K_closed = " + std::to_string(rep.K_closed));
  }

  std::vector<int> grid = opts.trace_grid;
  if (grid.empty()) {
    if (d <= 2)
      grid = {10, 12, 14, 16, 18, 20};
    else if (d == 3)
      grid = {6, 7, 8, 9, 10};
    else
      grid = {3, 4, 5};
  }
  rep.trace = K_trace_estimate(spec, d, grid, opts.integral.exec);
  if (std::abs(rep.trace.estimate - rep.K_closed) > std::max(0.1, 3 * rep.trace.uncertainty))
    fail("K_trace = " + std::to_string(rep.trace.estimate) + " vs K_closed = " + std::to_string(rep.K_closed));

  std::vector<int> ms(d);
  std::iota(ms.begin(), ms.end(), 1);
  try {
    rep.stages = asymptotic_sequences(spec, ms, rng, exact);
  } catch (const InconsistencyError& e) {
    fail(e.what());
  }

  rep.gbc_equal = rep.K_closed == rep.chi_rank;
  rep.consistent = rep.failures.empty();
  return rep;
}

}  // namespace dacurv
