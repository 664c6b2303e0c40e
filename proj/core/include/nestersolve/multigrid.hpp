#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "nestersolve/linalg.hpp"
#include "nestersolve/solvers.hpp"

namespace nestersolve {

/// Uniform vertex grid on the unit square with n x n interior unknowns and
/// homogeneous Dirichlet boundary; mesh width h = 1/(n+1). Unknown (i, j)
/// (x index i, y index j) is stored at j*n + i.
struct Grid2D {
  std::size_t n = 1;

  double h() const noexcept { return 1.0 / static_cast<double>(n + 1); }
  std::size_t size() const noexcept { return n * n; }
  std::size_t cells_per_side() const noexcept { return n + 1; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * n + i; }

  /// Standard coarsening is possible when n = 2m + 1 with m >= 1.
  bool coarsenable() const noexcept { return n >= 3 && n % 2 == 1; }
  Grid2D coarse() const;

  /// Grid with `intervals` mesh intervals per side (h = 1/intervals).
  /// `intervals` must be a power of two >= 2.
  static Grid2D with_intervals(std::size_t intervals);
};

/// Node-wise 3x3 stencil operator. Entry k of a stencil couples node (i, j)
/// to (i + dx, j + dy) with k = (dy + 1) * 3 + (dx + 1). Couplings that
/// would leave the grid are stored as zero.
class StencilOperator {
 public:
  using Stencil = std::array<double, 9>;
  static constexpr std::size_t kCenter = 4;
  static constexpr std::size_t slot(int dx, int dy) noexcept {
    return static_cast<std::size_t>((dy + 1) * 3 + (dx + 1));
  }

  explicit StencilOperator(Grid2D grid);

  const Grid2D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }

  Stencil& at(std::size_t i, std::size_t j) { return stencils_[grid_.index(i, j)]; }
  const Stencil& at(std::size_t i, std::size_t j) const { return stencils_[grid_.index(i, j)]; }
  const Stencil& at(std::size_t node) const { return stencils_[node]; }

  /// y = A x.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// r = f - A x.
  void residual(std::span<const double> x, std::span<const double> f, std::span<double> r) const;

  SparseMatrix to_csr() const;

  /// Zeroes couplings that point outside the grid.
  void clip_to_grid();

 private:
  Grid2D grid_;
  std::vector<Stencil> stencils_;
};

/// Diffusion coefficient per mesh cell, (n+1)^2 cells, row-major.
struct CoefficientField {
  Grid2D grid;
  std::vector<double> sigma;

  double cell(std::size_t ci, std::size_t cj) const {
    return sigma[cj * grid.cells_per_side() + ci];
  }
};

enum class CoefficientDistribution { LogNormal, Uniform };

/// LogNormal draws exp(N(0, 1)); Uniform draws from (0, 1). Deterministic
/// per seed.
CoefficientField sample_coefficients(const Grid2D& grid, CoefficientDistribution dist,
                                     std::uint64_t seed);

/// Five-point Laplacian (1/h^2)[0 -1 0; -1 4 -1; 0 -1 0].
StencilOperator build_poisson_5pt(const Grid2D& grid);

/// Bilinear finite elements for -div(sigma grad u) with sigma constant per
/// cell. Element matrix (sigma_e/6)[4 -1 -2 -1; -1 4 -1 -2; -2 -1 4 -1; -1 -2 -1 4]
/// with corners ordered counterclockwise.
StencilOperator build_fem_diffusion(const Grid2D& grid, const CoefficientField& sigma);

enum class RelaxKind { JacobiDamped, RedBlackGS, LexGS };

struct Relaxation {
  RelaxKind kind = RelaxKind::JacobiDamped;
  double omega = 0.8;  ///< damping; used by JacobiDamped only
};

/// One relaxation sweep in place. Red points are (i + j) even.
void relax_sweep(const Relaxation& relax, const StencilOperator& op, std::span<double> x,
                 std::span<const double> rhs);
Vector relax_sweep(const Relaxation& relax, const StencilOperator& op,
                   std::span<const double> x, std::span<const double> rhs);

/// Full weighting (1/16)[1 2 1; 2 4 2; 1 2 1] onto fine_grid.coarse().
Vector restrict_full_weighting(std::span<const double> fine, const Grid2D& fine_grid);
/// Bilinear interpolation from coarse_grid onto the grid it coarsens.
Vector prolong_bilinear(std::span<const double> coarse, const Grid2D& coarse_grid);

enum class Coarsening { Rediscretize, Galerkin };

/// Rediscretize: five-point Laplacian on the coarse grid.
/// Galerkin: R A P with full weighting and bilinear interpolation.
StencilOperator coarsen(const StencilOperator& op, Coarsening kind);

enum class CoarseSolver {
  Direct,   ///< dense LU, at most kMaxDirectUnknowns unknowns
  Relaxed,  ///< nu1 + nu2 relaxation sweeps only
};

inline constexpr std::size_t kMaxDirectUnknowns = 1024;

struct CycleSpec {
  std::size_t nu1 = 1;
  std::size_t nu2 = 0;
  Relaxation relax;
  Coarsening coarsening = Coarsening::Rediscretize;
  /// Coarsening stops once a level has at most this many points per side.
  std::size_t coarsest_n = 3;
  CoarseSolver coarse_solver = CoarseSolver::Direct;

  void validate() const;
};

class MultigridHierarchy {
 public:
  MultigridHierarchy(StencilOperator fine, const CycleSpec& spec);

  std::size_t levels() const noexcept { return operators_.size(); }
  const StencilOperator& op(std::size_t level) const { return operators_.at(level); }
  const StencilOperator& finest() const { return operators_.front(); }
  /// Null when the coarse solver is not Direct.
  const LuFactorization* coarsest_solver() const noexcept { return coarsest_lu_.get(); }

 private:
  std::vector<StencilOperator> operators_;
  std::unique_ptr<LuFactorization> coarsest_lu_;
};

/// One V(nu1, nu2) cycle starting from x.
Vector v_cycle(const MultigridHierarchy& hier, const CycleSpec& spec, std::span<const double> x,
               std::span<const double> rhs);

/// The V-cycle as a stationary sweep.
class VCycleSweep final : public StationarySweep {
 public:
  VCycleSweep(std::shared_ptr<const MultigridHierarchy> hier, CycleSpec spec);

  std::size_t size() const override { return hier_->finest().size(); }
  void apply(std::span<const double> x, std::span<const double> rhs,
             std::span<double> out) const override;

  const MultigridHierarchy& hierarchy() const noexcept { return *hier_; }
  const CycleSpec& spec() const noexcept { return spec_; }

 private:
  std::shared_ptr<const MultigridHierarchy> hier_;
  CycleSpec spec_;
};

}  // namespace nestersolve
