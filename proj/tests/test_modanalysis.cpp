#include <gtest/gtest.h>

#include "dacurv/errors.hpp"
#include "dacurv/modanalysis.hpp"
#include "test_util.hpp"

using namespace dacurv;
using dacurv::testing::make_spec;
using dacurv::testing::vec;

TEST(Localize, ConstantsGiveIdentity) {
  auto spec = make_spec(2, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}});
  auto A = localize(spec, {0.3, {0.1, 0.2}});
  EXPECT_TRUE(A.isApprox(Eigen::MatrixXcd::Identity(3, 3)));
  EXPECT_EQ(numerical_rank(A, 1e-8), 3);
}

TEST(Localize, GraphGeneratorAtHalf) {
  auto A = localize(make_spec(2, {{"1", "z1"}}), {0.5, 0.0});
  ASSERT_EQ(A.rows(), 1);
  EXPECT_EQ(A(0, 0), std::complex<double>(1.0));
  EXPECT_EQ(A(0, 1), std::complex<double>(0.5));
  EXPECT_EQ(numerical_rank(A, 1e-8), 1);
}

TEST(Localize, CommonZeroHasRankZero) {
  auto A = localize(make_spec(2, {{"z1", "z2"}}), {0.0, 0.0});
  EXPECT_EQ(numerical_rank(A, 1e-8), 0);
}

TEST(Localize, RejectsPointsOffTheBall) {
  auto spec = make_spec(2, {{"1", "z1"}});
  EXPECT_THROW(localize(spec, {0.8, 0.6}), InputError);
  EXPECT_THROW(localize(spec, {1.0, 0.5}), InputError);
}

TEST(FiberDimension, Examples) {
  Rng rng(7);
  EXPECT_EQ(fiber_dimension(make_spec(2, {{"1", "0"}, {"0", "1"}}), rng).rank, 2);
  EXPECT_EQ(fiber_dimension(make_spec(2, {{"1", "z1"}}), rng).rank, 1);
  auto r = fiber_dimension(make_spec(2, {{"z1", "z2"}, {"z2", "z1"}}), rng);
  EXPECT_EQ(r.rank, 2);
  EXPECT_TRUE(r.confident);
  EXPECT_DOUBLE_EQ(r.attainment, 1.0);
}

TEST(FiberDimension, TwoByTwoDeterminantAtGivenPoint) {
  auto A = localize(make_spec(2, {{"z1", "z2"}, {"z2", "z1"}}), {0.5, 1.0 / 3});
  EXPECT_EQ(numerical_rank(A, 1e-8), 2);
}

TEST(FiberDimension, DominatesEverySample) {
  Rng rng(11);
  auto spec = make_spec(3, {{"z1", "z2", "0"}, {"z2*z3", "z3^2", "z1"}, {"z1*z3", "z2*z3", "0"}});
  auto fd = fiber_dimension(spec, rng);
  for (int k = 0; k < 50; ++k)
    EXPECT_LE(numerical_rank(localize(spec, random_ball_point(rng, 3)), 1e-8), fd.rank);
  EXPECT_EQ(fd.rank, 2);
}

TEST(FiberDimension, RejectsZeroTrials) {
  Rng rng(1);
  GenericRankOptions o;
  o.trials = 0;
  EXPECT_THROW(fiber_dimension(make_spec(1, {{"1"}}), rng, o), InputError);
}

TEST(GenericRank, Examples) {
  Rng rng(3);
  GenericRankOptions exact;
  exact.exact_confirm = true;
  for (std::size_t k = 1; k <= 4; ++k) {
    auto r = generic_rank(PolyMatrix::identity(k), 2, rng, exact);
    EXPECT_EQ(r.rank, static_cast<int>(k));
    EXPECT_TRUE(r.exact_confirmed);
  }
  auto prop = PolyMatrix::from_rows({vec({"z1", "z2"}), vec({"2*z1", "2*z2"})});
  auto r = generic_rank(prop, 2, rng, exact);
  EXPECT_EQ(r.rank, 1);
  EXPECT_TRUE(r.exact_confirmed);
  EXPECT_FALSE(r.minor_determinant.is_zero());
  EXPECT_EQ(generic_rank(PolyMatrix::from_rows({vec({"1", "z1"})}), 2, rng).rank, 1);
}

TEST(GenericRank, ExactRankPivots) {
  std::vector<Rational> a = {0, 1, 2, 0, 2, 4, 1, 0, 0};
  auto er = exact_rank(a, 3, 3);
  EXPECT_EQ(er.rank, 2);
  ASSERT_EQ(er.rows.size(), 2u);
  ASSERT_EQ(er.cols.size(), 2u);
  auto at = [&](std::size_t i, std::size_t j) { return a[er.rows[i] * 3 + er.cols[j]]; };
  EXPECT_NE(at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0), 0);
}

TEST(GenericRank, EscalatesWhenRankIsRarelyAttained) {
  // Full rank only off a tiny neighbourhood is impossible for polynomials, so
  // force disagreement with a tolerance near the smallest singular value.
  Rng rng(5);
  auto m = PolyMatrix::from_rows({vec({"1", "0"}), vec({"0", "z1^6"})});
  GenericRankOptions o;
  o.trials = 4;
  o.tol = 1e-3;
  auto r = generic_rank(m, 1, rng, o);
  EXPECT_EQ(r.rank, 2);
  EXPECT_TRUE(r.confident);
  EXPECT_GE(r.trials_used, 4);
}

TEST(GenericRank, InvariantUnderUnimodularRowMixes) {
  Rng rng(19);
  auto base = std::vector<VectorPolynomial>{vec({"z1", "z2", "z1*z2"}), vec({"z2^2", "z1", "0"}),
                                           vec({"z1 + z2^2", "z1 + z2", "z1*z2"})};
  auto r0 = generic_rank(PolyMatrix::from_rows(base), 2, rng).rank;
  ASSERT_EQ(r0, 2);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    // Product of elementary row operations with integer multipliers.
    auto rows = base;
    for (int op = 0; op < 6; ++op) {
      std::size_t i = static_cast<std::size_t>(trial + op) % 3;
      std::size_t j = (i + 1 + static_cast<std::size_t>(op % 2)) % 3;
      rows[i] += Polynomial(static_cast<long>(coef(rng))) * rows[j];
    }
    EXPECT_EQ(generic_rank(PolyMatrix::from_rows(rows), 2, rng).rank, r0);
  }
}

TEST(IndependentSubset, Examples) {
  Rng rng(2);
  auto consts = independent_subset(make_spec(2, {{"1", "0"}, {"0", "1"}}), rng);
  EXPECT_TRUE(consts.subset.empty());
  EXPECT_EQ(consts.fd, 2);

  auto graph = independent_subset(make_spec(2, {{"1", "z1"}}), rng);
  EXPECT_EQ(graph.subset, (std::vector<std::size_t>{1}));
  EXPECT_EQ(graph.complement, (std::vector<std::size_t>{0}));

  auto three = independent_subset(make_spec(2, {{"z1", "z2", "0"}}), rng);
  EXPECT_EQ(three.subset, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(three.fd, 1);
}

TEST(IndependentSubset, SkipsZeroColumns) {
  Rng rng(2);
  auto s = independent_subset(make_spec(2, {{"0", "z2", "z1"}}), rng);
  EXPECT_EQ(s.complement, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.subset, (std::vector<std::size_t>{0, 2}));
}

TEST(IndependentSubset, SizePlusFiberDimensionIsN) {
  Rng rng(23);
  std::vector<ModuleSpec> specs = {
      make_spec(2, {{"1"}}),
      make_spec(2, {{"z1", "z2"}}),
      make_spec(2, {{"z1", "z2"}, {"z2", "z1"}}),
      make_spec(3, {{"z1", "z2", "z3"}, {"z2", "z3", "z1"}}),
      make_spec(3, {{"z1", "0", "z3", "1"}, {"0", "z2", "0", "z1"}, {"z1", "z2", "z3", "1 + z1"}}),
  };
  for (const auto& s : specs) {
    auto r = independent_subset(s, rng);
    EXPECT_EQ(r.subset.size() + static_cast<std::size_t>(r.fd), s.N);
  }
}

TEST(Certificate, SingleGeneratorIsItsOwnWitness) {
  Rng rng(4);
  auto spec = make_spec(2, {{"z1", "z2"}});
  auto c = dependence_certificate(spec, {0, 1}, rng);
  ASSERT_TRUE(c.available) << c.reason;
  EXPECT_EQ(c.construction_case, 2);
  EXPECT_EQ(c.witness, vec({"z1", "z2"}));
  EXPECT_TRUE(c.support_check && c.combination_check && c.nonzero_check);
  EXPECT_LT(certificate_quotient_residual(spec, c), 1e-8);
}

TEST(Certificate, GraphRelation) {
  Rng rng(4);
  auto spec = make_spec(1, {{"1", "z1"}});
  auto c = dependence_certificate(spec, {0, 1}, rng);
  ASSERT_TRUE(c.available) << c.reason;
  EXPECT_EQ(c.witness, vec({"1", "z1"}));
  EXPECT_LT(certificate_quotient_residual(spec, c), 1e-8);
}

TEST(Certificate, WrongSubsetSizeIsRejected) {
  Rng rng(4);
  EXPECT_THROW(dependence_certificate(make_spec(2, {{"1", "z1"}}), {0}, rng), InputError);
  EXPECT_THROW(dependence_certificate(make_spec(2, {{"1", "z1"}}), {0, 0}, rng), InputError);
  EXPECT_THROW(dependence_certificate(make_spec(2, {{"1", "z1"}}), {0, 5}, rng), InputError);
}

TEST(Certificate, VanishingCofactorTakesTheKernelPath) {
  // l = 2, W = {0, 1}, v = {2}: column 2 of the first generator is zero, so
  // the cofactor of the second row vanishes.
  Rng rng(8);
  auto spec = make_spec(2, {{"z1", "0", "0"}, {"z2", "1", "z1"}});
  auto c = dependence_certificate(spec, {0, 1}, rng);
  ASSERT_TRUE(c.available) << c.reason;
  EXPECT_EQ(c.construction_case, 1);
  for (std::size_t j : c.witness.support()) EXPECT_LE(j, 1u);
  EXPECT_LT(certificate_quotient_residual(spec, c), 1e-8);
}

TEST(Certificate, SoundOnAssortedSpecs) {
  Rng rng(31);
  struct Case {
    ModuleSpec spec;
    std::vector<std::size_t> W;
  };
  std::vector<Case> cases = {
      {make_spec(2, {{"z1", "z2"}, {"z2", "z1"}}), {0}},
      {make_spec(2, {{"z1", "z2"}, {"z2", "z1"}}), {1}},
      {make_spec(2, {{"1", "z1", "z2"}}), {0, 1, 2}},
      {make_spec(2, {{"1", "z1", "z2"}, {"z2", "0", "1"}}), {0, 2}},
      {make_spec(2, {{"1", "z1", "z2"}, {"z2", "0", "1"}}), {1, 2}},
      {make_spec(3, {{"z1", "z2", "z3", "0"}, {"0", "z3", "z1", "z2"}}), {0, 1, 3}},
      {make_spec(3, {{"z1", "z2", "z3", "0"}, {"0", "z3", "z1", "z2"}}), {1, 2, 3}},
  };
  for (const auto& [spec, W] : cases) {
    auto c = dependence_certificate(spec, W, rng);
    ASSERT_TRUE(c.available) << c.reason;
    EXPECT_TRUE(verify_certificate_exact(spec, c));
    EXPECT_FALSE(c.witness.is_zero());
    for (std::size_t j : c.witness.support()) EXPECT_TRUE(std::binary_search(W.begin(), W.end(), j));
    EXPECT_LT(certificate_quotient_residual(spec, c), 1e-8);
  }
}

TEST(Certificate, TamperedCertificateFailsVerification) {
  Rng rng(4);
  auto spec = make_spec(2, {{"1", "z1"}});
  auto c = dependence_certificate(spec, {0, 1}, rng);
  c.witness = vec({"1", "z2"});
  EXPECT_FALSE(verify_certificate_exact(spec, c));
}

TEST(KernelBasis, AnnihilatesTheMatrix) {
  Rng rng(6);
  auto m = PolyMatrix::from_rows({vec({"1", "z1", "z2"}), vec({"z2", "0", "1"})});
  GenericRankOptions o;
  o.exact_confirm = true;
  auto r = generic_rank(m, 2, rng, o);
  auto ker = kernel_basis(m, r);
  ASSERT_EQ(ker.size(), 1u);
  EXPECT_FALSE(ker[0].is_zero());
}
