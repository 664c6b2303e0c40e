#include "nestersolve/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nestersolve/error.hpp"
#include "nestersolve/random.hpp"

namespace nestersolve {

namespace {

// Element stiffness of the bilinear Laplacian on a square, times 6.
// Corners: 0 = (0,0), 1 = (1,0), 2 = (1,1), 3 = (0,1).
constexpr double kElementStiffness[4][4] = {
    {4, -1, -2, -1}, {-1, 4, -1, -2}, {-2, -1, 4, -1}, {-1, -2, -1, 4}};
constexpr int kCornerDx[4] = {0, 1, 1, 0};
constexpr int kCornerDy[4] = {0, 0, 1, 1};

// Visits the in-grid neighbours of (i, j): fn(slot, neighbour index).
template <typename Fn>
inline void for_each_neighbour(const Grid2D& g, std::size_t i, std::size_t j, Fn&& fn) {
  const auto n = static_cast<long>(g.n);
  for (int dy = -1; dy <= 1; ++dy) {
    const long jj = static_cast<long>(j) + dy;
    if (jj < 0 || jj >= n) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      const long ii = static_cast<long>(i) + dx;
      if (ii < 0 || ii >= n) continue;
      fn(StencilOperator::slot(dx, dy), static_cast<std::size_t>(jj * n + ii));
    }
  }
}

// Off-diagonal part of row (i, j) applied to x.
inline double off_diagonal(const StencilOperator& op, std::size_t i, std::size_t j,
                           std::span<const double> x) {
  const auto& s = op.at(i, j);
  double sum = 0.0;
  for_each_neighbour(op.grid(), i, j, [&](std::size_t k, std::size_t nb) {
    if (k != StencilOperator::kCenter) sum += s[k] * x[nb];
  });
  return sum;
}

inline void gauss_seidel_point(const StencilOperator& op, std::size_t i, std::size_t j,
                               std::span<double> x, std::span<const double> rhs) {
  const std::size_t node = op.grid().index(i, j);
  x[node] = (rhs[node] - off_diagonal(op, i, j, x)) / op.at(node)[StencilOperator::kCenter];
}

void require_diagonal(const StencilOperator& op) {
  for (std::size_t node = 0; node < op.size(); ++node) {
    if (op.at(node)[StencilOperator::kCenter] == 0.0) {
      throw InvalidArgument("relax_sweep: zero diagonal at node " + std::to_string(node));
    }
  }
}

}  // namespace

Grid2D Grid2D::coarse() const {
  if (!coarsenable()) {
    throw InvalidArgument("Grid2D: n = " + std::to_string(n) + " cannot be coarsened");
  }
  return Grid2D{(n - 1) / 2};
}

Grid2D Grid2D::with_intervals(std::size_t intervals) {
  if (intervals < 2 || (intervals & (intervals - 1)) != 0) {
    throw InvalidArgument("Grid2D: intervals per side must be a power of two >= 2");
  }
  return Grid2D{intervals - 1};
}

StencilOperator::StencilOperator(Grid2D grid) : grid_(grid), stencils_(grid.size(), Stencil{}) {
  if (grid_.n == 0) throw InvalidArgument("StencilOperator: empty grid");
}

void StencilOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = grid_.n;
  if (x.size() != size() || y.size() != size()) {
    throw InvalidArgument("StencilOperator::apply: dimension mismatch");
  }
  for (std::size_t j = 0; j < n; ++j) {
    const bool j_inner = j > 0 && j + 1 < n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t node = j * n + i;
      const auto& s = stencils_[node];
      if (j_inner && i > 0 && i + 1 < n) {
        const double* below = &x[node - n];
        const double* here = &x[node];
        const double* above = &x[node + n];
        y[node] = s[0] * below[-1] + s[1] * below[0] + s[2] * below[1] + s[3] * here[-1] +
                  s[4] * here[0] + s[5] * here[1] + s[6] * above[-1] + s[7] * above[0] +
                  s[8] * above[1];
      } else {
        double sum = 0.0;
        for_each_neighbour(grid_, i, j, [&](std::size_t k, std::size_t nb) { sum += s[k] * x[nb]; });
        y[node] = sum;
      }
    }
  }
}

void StencilOperator::residual(std::span<const double> x, std::span<const double> f,
                               std::span<double> r) const {
  apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = f[i] - r[i];
}

SparseMatrix StencilOperator::to_csr() const {
  const std::size_t n = grid_.n;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  offsets.reserve(size() + 1);
  cols.reserve(9 * size());
  vals.reserve(9 * size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = at(i, j);
      // slots visit neighbours in increasing index order
      for_each_neighbour(grid_, i, j, [&](std::size_t k, std::size_t nb) {
        if (s[k] != 0.0) {
          cols.push_back(nb);
          vals.push_back(s[k]);
        }
      });
      offsets.push_back(cols.size());
    }
  }
  return SparseMatrix(size(), size(), std::move(offsets), std::move(cols), std::move(vals));
}

void StencilOperator::clip_to_grid() {
  const std::size_t n = grid_.n;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = at(i, j);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const long ii = static_cast<long>(i) + dx;
          const long jj = static_cast<long>(j) + dy;
          if (ii < 0 || jj < 0 || ii >= static_cast<long>(n) || jj >= static_cast<long>(n)) {
            s[slot(dx, dy)] = 0.0;
          }
        }
      }
    }
  }
}

CoefficientField sample_coefficients(const Grid2D& grid, CoefficientDistribution dist,
                                     std::uint64_t seed) {
  CoefficientField field{grid, std::vector<double>(grid.cells_per_side() * grid.cells_per_side())};
  SplitMix64 rng(seed);
  if (dist == CoefficientDistribution::LogNormal) {
    std::lognormal_distribution<double> draw(0.0, 1.0);
    for (auto& s : field.sigma) s = draw(rng);
  } else {
    for (auto& s : field.sigma) {
      do {
        s = rng.uniform();
      } while (s == 0.0);
    }
  }
  return field;
}

StencilOperator build_poisson_5pt(const Grid2D& grid) {
  StencilOperator op(grid);
  const double scale = 1.0 / (grid.h() * grid.h());
  for (std::size_t j = 0; j < grid.n; ++j) {
    for (std::size_t i = 0; i < grid.n; ++i) {
      auto& s = op.at(i, j);
      s[StencilOperator::slot(0, -1)] = -scale;
      s[StencilOperator::slot(-1, 0)] = -scale;
      s[StencilOperator::kCenter] = 4.0 * scale;
      s[StencilOperator::slot(1, 0)] = -scale;
      s[StencilOperator::slot(0, 1)] = -scale;
    }
  }
  op.clip_to_grid();
  return op;
}

StencilOperator build_fem_diffusion(const Grid2D& grid, const CoefficientField& sigma) {
  const std::size_t cells = grid.cells_per_side();
  if (sigma.grid.n != grid.n || sigma.sigma.size() != cells * cells) {
    throw InvalidArgument("build_fem_diffusion: coefficient field does not match the grid");
  }
  for (double s : sigma.sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("build_fem_diffusion: coefficients must be positive");
    }
  }
  StencilOperator op(grid);
  const auto n = static_cast<long>(grid.n);
  for (std::size_t cj = 0; cj < cells; ++cj) {
    for (std::size_t ci = 0; ci < cells; ++ci) {
      const double w = sigma.cell(ci, cj) / 6.0;
      // interior-node index of the cell's lower-left corner
      const long i0 = static_cast<long>(ci) - 1;
      const long j0 = static_cast<long>(cj) - 1;
      for (int a = 0; a < 4; ++a) {
        const long ia = i0 + kCornerDx[a];
        const long ja = j0 + kCornerDy[a];
        if (ia < 0 || ja < 0 || ia >= n || ja >= n) continue;
        auto& s = op.at(static_cast<std::size_t>(ia), static_cast<std::size_t>(ja));
        for (int b = 0; b < 4; ++b) {
          s[StencilOperator::slot(kCornerDx[b] - kCornerDx[a], kCornerDy[b] - kCornerDy[a])] +=
              w * kElementStiffness[a][b];
        }
      }
    }
  }
  op.clip_to_grid();
  return op;
}

void relax_sweep(const Relaxation& relax, const StencilOperator& op, std::span<double> x,
                 std::span<const double> rhs) {
  if (x.size() != op.size() || rhs.size() != op.size()) {
    throw InvalidArgument("relax_sweep: dimension mismatch");
  }
  require_diagonal(op);
  const std::size_t n = op.grid().n;
  switch (relax.kind) {
    case RelaxKind::JacobiDamped: {
      Vector r(op.size());
      op.residual(x, rhs, r);
      for (std::size_t node = 0; node < op.size(); ++node) {
        x[node] += relax.omega * r[node] / op.at(node)[StencilOperator::kCenter];
      }
      break;
    }
    case RelaxKind::RedBlackGS:
      for (std::size_t colour = 0; colour < 2; ++colour) {
        for (std::size_t j = 0; j < n; ++j) {
          for (std::size_t i = (j + colour) % 2; i < n; i += 2) gauss_seidel_point(op, i, j, x, rhs);
        }
      }
      break;
    case RelaxKind::LexGS:
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) gauss_seidel_point(op, i, j, x, rhs);
      }
      break;
  }
}

Vector relax_sweep(const Relaxation& relax, const StencilOperator& op,
                   std::span<const double> x, std::span<const double> rhs) {
  Vector out(x.begin(), x.end());
  relax_sweep(relax, op, std::span<double>(out), rhs);
  return out;
}

void CycleSpec::validate() const {
  if (nu1 + nu2 < 1) throw InvalidArgument("CycleSpec: nu1 + nu2 must be >= 1");
  if (relax.kind == RelaxKind::JacobiDamped && !(relax.omega > 0.0 && relax.omega <= 1.0)) {
    throw InvalidArgument("CycleSpec: Jacobi damping must lie in (0, 1]");
  }
  if (coarsest_n < 1) throw InvalidArgument("CycleSpec: coarsest_n must be >= 1");
}

MultigridHierarchy::MultigridHierarchy(StencilOperator fine, const CycleSpec& spec) {
  spec.validate();
  operators_.push_back(std::move(fine));
  while (operators_.back().grid().n > spec.coarsest_n && operators_.back().grid().coarsenable()) {
    operators_.push_back(coarsen(operators_.back(), spec.coarsening));
  }
  if (spec.coarse_solver == CoarseSolver::Direct) {
    const auto& coarsest = operators_.back();
    if (coarsest.size() > kMaxDirectUnknowns) {
      throw InvalidArgument("MultigridHierarchy: coarsest level has " +
                            std::to_string(coarsest.size()) +
                            " unknowns, more than the direct-solve limit");
    }
    coarsest_lu_ = std::make_unique<LuFactorization>(to_dense(coarsest.to_csr()));
  }
}

namespace {

void cycle(const MultigridHierarchy& hier, const CycleSpec& spec, std::size_t level,
           std::span<double> x, std::span<const double> rhs) {
  const auto& op = hier.op(level);
  if (level + 1 == hier.levels()) {
    if (const auto* lu = hier.coarsest_solver()) {
      const Vector sol = lu->solve(rhs);
      std::copy(sol.begin(), sol.end(), x.begin());
    } else {
      for (std::size_t s = 0; s < spec.nu1 + spec.nu2; ++s) relax_sweep(spec.relax, op, x, rhs);
    }
    return;
  }
  for (std::size_t s = 0; s < spec.nu1; ++s) relax_sweep(spec.relax, op, x, rhs);

  Vector r(op.size());
  op.residual(x, rhs, r);
  const Vector rc = restrict_full_weighting(r, op.grid());
  Vector ec(rc.size(), 0.0);
  cycle(hier, spec, level + 1, ec, rc);
  const Vector correction = prolong_bilinear(ec, hier.op(level + 1).grid());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += correction[i];

  for (std::size_t s = 0; s < spec.nu2; ++s) relax_sweep(spec.relax, op, x, rhs);
}

}  // namespace

Vector v_cycle(const MultigridHierarchy& hier, const CycleSpec& spec, std::span<const double> x,
               std::span<const double> rhs) {
  if (x.size() != hier.finest().size() || rhs.size() != hier.finest().size()) {
    throw InvalidArgument("v_cycle: dimension mismatch");
  }
  Vector out(x.begin(), x.end());
  cycle(hier, spec, 0, out, rhs);
  return out;
}

VCycleSweep::VCycleSweep(std::shared_ptr<const MultigridHierarchy> hier, CycleSpec spec)
    : hier_(std::move(hier)), spec_(spec) {
  if (!hier_) throw InvalidArgument("VCycleSweep: null hierarchy");
  spec_.validate();
}

void VCycleSweep::apply(std::span<const double> x, std::span<const double> rhs,
                        std::span<double> out) const {
  std::copy(x.begin(), x.end(), out.begin());
  cycle(*hier_, spec_, 0, out, rhs);
}

}  // namespace nestersolve
