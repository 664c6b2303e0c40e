#include <cstdlib>

#include "nestersolve/error.hpp"
#include "nestersolve/multigrid.hpp"

namespace nestersolve {

namespace {

// One-dimensional bilinear weight for a fine/coarse offset measured in fine cells.
constexpr double hat(long d) noexcept {
  return d == 0 ? 1.0 : (d == 1 || d == -1) ? 0.5 : 0.0;
}

// Fine index of coarse node k.
constexpr long fine_of(long k) noexcept { return 2 * k + 1; }

}  // namespace

Vector restrict_full_weighting(std::span<const double> fine, const Grid2D& fine_grid) {
  if (fine.size() != fine_grid.size()) {
    throw InvalidArgument("restrict_full_weighting: dimension mismatch");
  }
  const Grid2D coarse = fine_grid.coarse();
  const std::size_t nf = fine_grid.n;
  Vector out(coarse.size());
  for (std::size_t cj = 0; cj < coarse.n; ++cj) {
    for (std::size_t ci = 0; ci < coarse.n; ++ci) {
      const std::size_t c = (2 * cj + 1) * nf + (2 * ci + 1);
      const double* lo = &fine[c - nf];
      const double* mid = &fine[c];
      const double* hi = &fine[c + nf];
      out[coarse.index(ci, cj)] =
          (lo[-1] + lo[1] + hi[-1] + hi[1] + 2.0 * (lo[0] + hi[0] + mid[-1] + mid[1]) +
           4.0 * mid[0]) /
          16.0;
    }
  }
  return out;
}

Vector prolong_bilinear(std::span<const double> coarse, const Grid2D& coarse_grid) {
  if (coarse.size() != coarse_grid.size()) {
    throw InvalidArgument("prolong_bilinear: dimension mismatch");
  }
  const std::size_t nf = 2 * coarse_grid.n + 1;
  Vector out(nf * nf, 0.0);
  for (std::size_t cj = 0; cj < coarse_grid.n; ++cj) {
    for (std::size_t ci = 0; ci < coarse_grid.n; ++ci) {
      const double v = coarse[coarse_grid.index(ci, cj)];
      const std::size_t c = (2 * cj + 1) * nf + (2 * ci + 1);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          out[c + dy * static_cast<long>(nf) + dx] += hat(dx) * hat(dy) * v;
        }
      }
    }
  }
  return out;
}

StencilOperator coarsen(const StencilOperator& op, Coarsening kind) {
  const Grid2D coarse = op.grid().coarse();
  if (kind == Coarsening::Rediscretize) return build_poisson_5pt(coarse);

  StencilOperator out(coarse);
  const auto nf = static_cast<long>(op.grid().n);
  const auto nc = static_cast<long>(coarse.n);
  for (long cj = 0; cj < nc; ++cj) {
    for (long ci = 0; ci < nc; ++ci) {
      auto& target = out.at(static_cast<std::size_t>(ci), static_cast<std::size_t>(cj));
      // rows of A weighted by R = P^T / 4
      for (int ay = -1; ay <= 1; ++ay) {
        for (int ax = -1; ax <= 1; ++ax) {
          const long ai = fine_of(ci) + ax;
          const long aj = fine_of(cj) + ay;
          const double rw = hat(ax) * hat(ay) / 4.0;
          const auto& stencil = op.at(static_cast<std::size_t>(ai), static_cast<std::size_t>(aj));
          for (int sy = -1; sy <= 1; ++sy) {
            for (int sx = -1; sx <= 1; ++sx) {
              const double a = stencil[StencilOperator::slot(sx, sy)];
              if (a == 0.0) continue;
              const long bi = ai + sx;
              const long bj = aj + sy;
              if (bi < 0 || bj < 0 || bi >= nf || bj >= nf) continue;
              // columns of P hitting fine node b
              for (int dy = -1; dy <= 1; ++dy) {
                const long kj = cj + dy;
                if (kj < 0 || kj >= nc) continue;
                const double wy = hat(bj - fine_of(kj));
                if (wy == 0.0) continue;
                for (int dx = -1; dx <= 1; ++dx) {
                  const long ki = ci + dx;
                  if (ki < 0 || ki >= nc) continue;
                  const double wx = hat(bi - fine_of(ki));
                  if (wx == 0.0) continue;
                  target[StencilOperator::slot(dx, dy)] += rw * a * wx * wy;
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace nestersolve
