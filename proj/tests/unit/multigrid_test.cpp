#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

#include "nestersolve/error.hpp"
#include "nestersolve/multigrid.hpp"
#include "nestersolve/random.hpp"

namespace ns = nestersolve;
using ns::Grid2D;
using ns::StencilOperator;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  ns::SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

std::vector<double> sine_mode(const Grid2D& g, int k, int l) {
  std::vector<double> v(g.size());
  const double h = g.h();
  for (std::size_t j = 0; j < g.n; ++j) {
    for (std::size_t i = 0; i < g.n; ++i) {
      v[g.index(i, j)] = std::sin(k * kPi * (i + 1) * h) * std::sin(l * kPi * (j + 1) * h);
    }
  }
  return v;
}

// Dense restriction matrix assembled from the operator itself, column by column.
ns::DenseMatrix dense_of(std::size_t rows, std::size_t cols,
                         const std::function<std::vector<double>(std::span<const double>)>& f) {
  ns::DenseMatrix m(rows, cols);
  std::vector<double> e(cols, 0.0);
  for (std::size_t c = 0; c < cols; ++c) {
    e[c] = 1.0;
    const auto col = f(e);
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = col[r];
    e[c] = 0.0;
  }
  return m;
}

ns::DenseMatrix multiply(const ns::DenseMatrix& a, const ns::DenseMatrix& b) {
  ns::DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

double acf_of_plain(const ns::StencilOperator& op, const ns::CycleSpec& spec) {
  auto hier = std::make_shared<const ns::MultigridHierarchy>(op, spec);
  const ns::VCycleSweep sweep(hier, spec);
  const auto a = op.to_csr();
  const auto res = ns::plain_solve(sweep, a, std::vector<double>(op.size(), 0.0),
                                   random_vector(op.size(), 1), {1e-8, 200});
  EXPECT_TRUE(res.trace.converged());
  return ns::acf_estimate(res.trace);
}

}  // namespace

TEST(Grid, Coarsening) {
  EXPECT_EQ(Grid2D::with_intervals(8).n, 7u);
  EXPECT_EQ(Grid2D{7}.coarse().n, 3u);
  EXPECT_FALSE(Grid2D{1}.coarsenable());
  EXPECT_FALSE(Grid2D{6}.coarsenable());
  EXPECT_THROW(Grid2D{6}.coarse(), ns::InvalidArgument);
  EXPECT_THROW(Grid2D::with_intervals(6), ns::InvalidArgument);
}

TEST(Poisson, SingleUnknown) {
  const auto op = ns::build_poisson_5pt(Grid2D{1});
  const auto s = op.at(0, 0);
  EXPECT_DOUBLE_EQ(s[StencilOperator::kCenter], 16.0);
  for (std::size_t k = 0; k < 9; ++k) {
    if (k != StencilOperator::kCenter) EXPECT_EQ(s[k], 0.0);
  }
}

TEST(Poisson, SineModeIsEigenvector) {
  const Grid2D g{15};
  const auto op = ns::build_poisson_5pt(g);
  const auto v = sine_mode(g, 1, 1);
  std::vector<double> y(g.size());
  op.apply(v, y);
  const double h = g.h();
  const double lambda = (2 - 2 * std::cos(kPi * h)) * 2 / (h * h);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], lambda * v[i], 1e-10);
}

TEST(Poisson, AssembledMatrixSymmetric) {
  const auto a = ns::to_dense(ns::build_poisson_5pt(Grid2D{7}).to_csr());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_EQ(a(i, j), a(j, i));
}

TEST(Coefficients, ReproducibleAndPositive) {
  const Grid2D g = Grid2D::with_intervals(32);
  const auto a = ns::sample_coefficients(g, ns::CoefficientDistribution::Uniform, 5);
  const auto b = ns::sample_coefficients(g, ns::CoefficientDistribution::Uniform, 5);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_EQ(a.sigma.size(), 32u * 32u);  // one value per cell
  const auto ln = ns::sample_coefficients(g, ns::CoefficientDistribution::LogNormal, 5);
  for (double s : ln.sigma) EXPECT_GT(s, 0.0);
  EXPECT_NE(ns::sample_coefficients(g, ns::CoefficientDistribution::Uniform, 6).sigma, a.sigma);
}

TEST(Coefficients, UniformMean) {
  const Grid2D g{999};  // 10^6 cells
  const auto f = ns::sample_coefficients(g, ns::CoefficientDistribution::Uniform, 17);
  ASSERT_EQ(f.sigma.size(), 1000000u);
  const double mean = std::accumulate(f.sigma.begin(), f.sigma.end(), 0.0) / f.sigma.size();
  EXPECT_NEAR(mean, 0.5, 0.002);
  for (double s : f.sigma) ASSERT_TRUE(s > 0.0 && s < 1.0);
}

TEST(Fem, UnitCoefficientStencil) {
  const Grid2D g{7};
  ns::CoefficientField f{g, std::vector<double>(64, 1.0)};
  const auto op = ns::build_fem_diffusion(g, f);
  const auto s = op.at(3, 3);
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_NEAR(s[k], k == StencilOperator::kCenter ? 8.0 / 3.0 : -1.0 / 3.0, 1e-15);
  }
  EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 0.0, 1e-14);
}

TEST(Fem, RandomCoefficientsSymmetricPositiveDefinite) {
  const Grid2D g{7};
  const auto f = ns::sample_coefficients(g, ns::CoefficientDistribution::LogNormal, 3);
  const auto op = ns::build_fem_diffusion(g, f);
  auto a = ns::to_dense(op.to_csr());
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ASSERT_NEAR(a(i, j), a(j, i), 1e-14);
  // interior rows sum to zero
  const auto s = op.at(3, 3);
  EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 0.0, 1e-12);
  // Cholesky
  for (std::size_t k = 0; k < n; ++k) {
    double d = a(k, k);
    for (std::size_t p = 0; p < k; ++p) d -= a(k, p) * a(k, p);
    ASSERT_GT(d, 0.0) << "pivot " << k;
    a(k, k) = std::sqrt(d);
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = a(i, k);
      for (std::size_t p = 0; p < k; ++p) v -= a(i, p) * a(k, p);
      a(i, k) = v / a(k, k);
    }
  }
}

TEST(Fem, RejectsNonPositiveCoefficient) {
  const Grid2D g{3};
  ns::CoefficientField f{g, std::vector<double>(16, 1.0)};
  f.sigma[5] = 0.0;
  EXPECT_THROW(ns::build_fem_diffusion(g, f), ns::InvalidArgument);
  f.sigma.pop_back();
  EXPECT_THROW(ns::build_fem_diffusion(g, f), ns::InvalidArgument);
}

TEST(Relax, ExactSolutionIsFixed) {
  const Grid2D g{7};
  const auto op = ns::build_fem_diffusion(
      g, ns::sample_coefficients(g, ns::CoefficientDistribution::Uniform, 2));
  const auto x = random_vector(g.size(), 3);
  std::vector<double> rhs(g.size());
  op.apply(x, rhs);
  for (auto kind : {ns::RelaxKind::JacobiDamped, ns::RelaxKind::RedBlackGS, ns::RelaxKind::LexGS}) {
    const auto y = ns::relax_sweep({kind, 0.8}, op, std::span<const double>(x), rhs);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-13);
  }
}

TEST(Relax, JacobiDampsModeBySymbol) {
  const Grid2D g{15};
  const auto op = ns::build_poisson_5pt(g);
  const int k = 8, l = 1;  // theta = (pi/2, pi h)
  const auto e = sine_mode(g, k, l);
  const double omega = 0.8;
  const auto y = ns::relax_sweep({ns::RelaxKind::JacobiDamped, omega}, op, std::span<const double>(e),
                                 std::vector<double>(g.size(), 0.0));
  const double t1 = k * kPi * g.h(), t2 = l * kPi * g.h();
  const double s = 1 - omega + omega / 2 * (std::cos(t1) + std::cos(t2));
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(y[i], s * e[i], 1e-10);
}

TEST(Relax, RedBlackSolvesSingleUnknown) {
  const auto op = ns::build_poisson_5pt(Grid2D{1});
  const auto y = ns::relax_sweep({ns::RelaxKind::RedBlackGS, 1.0}, op,
                                 std::span<const double>(std::vector<double>{3.0}),
                                 std::vector<double>{8.0});
  EXPECT_DOUBLE_EQ(y[0], 0.5);
}

TEST(Relax, GaussSeidelMatchesTriangularSolve) {
  const Grid2D g{7};
  const auto op = ns::build_fem_diffusion(
      g, ns::sample_coefficients(g, ns::CoefficientDistribution::LogNormal, 4));
  const auto a = ns::to_dense(op.to_csr());
  const std::size_t n = g.size();
  const auto x = random_vector(n, 5);
  const auto rhs = random_vector(n, 6);

  for (auto kind : {ns::RelaxKind::LexGS, ns::RelaxKind::RedBlackGS}) {
    // visiting order
    std::vector<std::size_t> order;
    if (kind == ns::RelaxKind::LexGS) {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
    } else {
      for (std::size_t colour = 0; colour < 2; ++colour)
        for (std::size_t node = 0; node < n; ++node)
          if ((node % g.n + node / g.n) % 2 == colour) order.push_back(node);
    }
    std::vector<std::size_t> pos(n);
    for (std::size_t p = 0; p < n; ++p) pos[order[p]] = p;
    // M = lower triangle in visiting order, x' = M^{-1}(b - (A - M) x)
    ns::DenseMatrix m(n, n);
    std::vector<double> b = rhs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (pos[j] <= pos[i]) {
          m(i, j) = a(i, j);
        } else {
          b[i] -= a(i, j) * x[j];
        }
      }
    }
    const auto expected = ns::LuFactorization(m).solve(b);
    const auto got = ns::relax_sweep({kind, 1.0}, op, std::span<const double>(x), rhs);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
  }
}

TEST(Relax, ZeroDiagonalThrows) {
  StencilOperator op(Grid2D{3});
  EXPECT_THROW(ns::relax_sweep({}, op, std::span<const double>(std::vector<double>(9, 0.0)),
                               std::vector<double>(9, 0.0)),
               ns::InvalidArgument);
}

TEST(Transfer, RestrictConstant) {
  const Grid2D g{15};
  const auto c = ns::restrict_full_weighting(std::vector<double>(g.size(), 1.0), g);
  ASSERT_EQ(c.size(), 49u);
  for (double v : c) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Transfer, ProlongDeltaIsHat) {
  const Grid2D coarse{3};
  std::vector<double> d(9, 0.0);
  d[coarse.index(1, 1)] = 1.0;
  const auto f = ns::prolong_bilinear(d, coarse);
  const Grid2D fine{7};
  ASSERT_EQ(f.size(), fine.size());
  EXPECT_DOUBLE_EQ(f[fine.index(3, 3)], 1.0);
  EXPECT_DOUBLE_EQ(f[fine.index(2, 3)], 0.5);
  EXPECT_DOUBLE_EQ(f[fine.index(3, 4)], 0.5);
  EXPECT_DOUBLE_EQ(f[fine.index(2, 2)], 0.25);
  EXPECT_DOUBLE_EQ(f[fine.index(4, 2)], 0.25);
  EXPECT_DOUBLE_EQ(f[fine.index(1, 3)], 0.0);
  EXPECT_DOUBLE_EQ(std::accumulate(f.begin(), f.end(), 0.0), 4.0);
}

TEST(Transfer, VariationalTranspose) {
  const Grid2D fine{15};
  const Grid2D coarse = fine.coarse();
  const auto v = random_vector(fine.size(), 1);
  const auto w = random_vector(coarse.size(), 2);
  const double lhs = ns::dot(ns::restrict_full_weighting(v, fine), w);
  const double rhs = 0.25 * ns::dot(v, ns::prolong_bilinear(w, coarse));
  EXPECT_NEAR(lhs, rhs, 1e-13);
  EXPECT_THROW(ns::restrict_full_weighting(v, Grid2D{7}), ns::InvalidArgument);
  EXPECT_THROW(ns::prolong_bilinear(v, coarse), ns::InvalidArgument);
}

TEST(Coarsen, RediscretizeHalves) {
  const auto c = ns::coarsen(ns::build_poisson_5pt(Grid2D{15}), ns::Coarsening::Rediscretize);
  EXPECT_EQ(c.grid().n, 7u);
  EXPECT_DOUBLE_EQ(c.at(3, 3)[StencilOperator::kCenter], 4.0 * 64.0);
}

TEST(Coarsen, GalerkinPoissonNinePointZeroRowSum) {
  const auto c = ns::coarsen(ns::build_poisson_5pt(Grid2D{15}), ns::Coarsening::Galerkin);
  const auto s = c.at(3, 3);
  for (double v : s) EXPECT_NE(v, 0.0);
  EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 0.0, 1e-10);
  // corner weight of R A P for the scaled Laplacian
  const double h2 = 1.0 / (16.0 * 16.0);
  EXPECT_NEAR(s[0] * h2, -1.0 / 16.0, 1e-14);
  EXPECT_NEAR(s[1] * h2, -1.0 / 8.0, 1e-14);
  EXPECT_NEAR(s[4] * h2, 3.0 / 4.0, 1e-14);
}

TEST(Coarsen, GalerkinIdentityAndSymmetry) {
  const Grid2D fine{7};
  const Grid2D coarse = fine.coarse();
  const auto op = ns::build_fem_diffusion(
      fine, ns::sample_coefficients(fine, ns::CoefficientDistribution::LogNormal, 8));
  const auto a = ns::to_dense(op.to_csr());
  const auto r = dense_of(coarse.size(), fine.size(),
                          [&](std::span<const double> v) { return ns::restrict_full_weighting(v, fine); });
  const auto p = dense_of(fine.size(), coarse.size(),
                          [&](std::span<const double> v) { return ns::prolong_bilinear(v, coarse); });
  const auto rap = multiply(multiply(r, a), p);
  const auto ac = ns::to_dense(ns::coarsen(op, ns::Coarsening::Galerkin).to_csr());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    for (std::size_t j = 0; j < coarse.size(); ++j) {
      EXPECT_NEAR(ac(i, j), rap(i, j), 1e-12);
      EXPECT_NEAR(ac(i, j), ac(j, i), 1e-12);
    }
  }
}

TEST(VCycle, ExactSolutionUnchanged) {
  const Grid2D g = Grid2D::with_intervals(32);
  const auto op = ns::build_poisson_5pt(g);
  ns::CycleSpec spec;
  spec.nu2 = 1;
  const ns::MultigridHierarchy hier(op, spec);
  const auto x = random_vector(g.size(), 1);
  std::vector<double> rhs(g.size());
  op.apply(x, rhs);
  const auto y = ns::v_cycle(hier, spec, x, rhs);
  std::vector<double> r(g.size());
  op.residual(y, rhs, r);
  EXPECT_LE(ns::norm2(r), 1e-12 * ns::norm2(rhs));
}

TEST(VCycle, IsAffine) {
  const Grid2D g = Grid2D::with_intervals(32);
  const auto op = ns::build_fem_diffusion(
      g, ns::sample_coefficients(g, ns::CoefficientDistribution::LogNormal, 1));
  ns::CycleSpec spec;
  spec.nu2 = 1;
  spec.relax = {ns::RelaxKind::LexGS, 1.0};
  spec.coarsening = ns::Coarsening::Galerkin;
  const ns::MultigridHierarchy hier(op, spec);
  const auto f = random_vector(g.size(), 2);
  const std::vector<double> zero(g.size(), 0.0);
  for (std::uint64_t seed = 3; seed < 6; ++seed) {
    const auto x = random_vector(g.size(), seed);
    const auto y = random_vector(g.size(), seed + 10);
    const auto lhs = ns::axpy(-1.0, ns::v_cycle(hier, spec, y, f), ns::v_cycle(hier, spec, x, f));
    const auto diff = ns::axpy(-1.0, y, x);
    const auto rhs = ns::axpy(-1.0, ns::v_cycle(hier, spec, zero, zero), ns::v_cycle(hier, spec, diff, zero));
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12);
  }
}

TEST(VCycle, MatchesDirectSolve) {
  const Grid2D g{31};
  const auto op = ns::build_poisson_5pt(g);
  ns::CycleSpec spec;
  spec.nu2 = 1;
  spec.relax = {ns::RelaxKind::RedBlackGS, 1.0};
  auto hier = std::make_shared<const ns::MultigridHierarchy>(op, spec);
  const ns::VCycleSweep sweep(hier, spec);
  const auto a = op.to_csr();
  const auto f = random_vector(g.size(), 4);
  const auto res = ns::plain_solve(sweep, a, f, std::vector<double>(g.size(), 0.0), {1e-13, 100});
  const auto exact = ns::LuFactorization(ns::to_dense(a)).solve(f);
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(res.x[i], exact[i], 1e-8);
}

TEST(VCycle, RedBlackV11Factor) {
  ns::CycleSpec spec;
  spec.nu2 = 1;
  spec.relax = {ns::RelaxKind::RedBlackGS, 1.0};
  EXPECT_LE(acf_of_plain(ns::build_poisson_5pt(Grid2D::with_intervals(128)), spec), 0.15);
}

TEST(VCycle, JacobiV10FactorMatchesSmoothing) {
  ns::CycleSpec spec;
  spec.relax = {ns::RelaxKind::JacobiDamped, 0.8};
  EXPECT_NEAR(acf_of_plain(ns::build_poisson_5pt(Grid2D::with_intervals(256)), spec), 0.6, 0.05);
}

TEST(Hierarchy, LevelsAndDirectLimit) {
  ns::CycleSpec spec;
  const ns::MultigridHierarchy hier(ns::build_poisson_5pt(Grid2D{63}), spec);
  EXPECT_EQ(hier.levels(), 5u);  // 63, 31, 15, 7, 3
  EXPECT_EQ(hier.op(4).grid().n, 3u);
  ASSERT_NE(hier.coarsest_solver(), nullptr);
  spec.coarsest_n = 63;
  EXPECT_THROW(ns::MultigridHierarchy(ns::build_poisson_5pt(Grid2D{63}), spec), ns::InvalidArgument);
  spec.coarse_solver = ns::CoarseSolver::Relaxed;
  const ns::MultigridHierarchy single(ns::build_poisson_5pt(Grid2D{63}), spec);
  EXPECT_EQ(single.levels(), 1u);
  EXPECT_EQ(single.coarsest_solver(), nullptr);
}

TEST(CycleSpec, Validation) {
  ns::CycleSpec spec;
  spec.nu1 = 0;
  EXPECT_THROW(spec.validate(), ns::InvalidArgument);
  spec.nu1 = 1;
  spec.relax.omega = 1.2;
  EXPECT_THROW(spec.validate(), ns::InvalidArgument);
  spec.relax.omega = 0.0;
  EXPECT_THROW(spec.validate(), ns::InvalidArgument);
}
