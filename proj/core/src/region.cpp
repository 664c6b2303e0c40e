#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "nestersolve/error.hpp"
#include "nestersolve/spectral.hpp"

namespace nestersolve {

namespace {

std::size_t axis_count(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidArgument("region grid: step must be positive");
  }
  if (!(hi >= lo)) throw InvalidArgument("region grid: max must be >= min");
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
}

}  // namespace

RegionGrid RegionGrid::square(double lo, double hi, std::size_t points) {
  if (points < 2) throw InvalidArgument("region grid: need at least 2 points per axis");
  const double step = (hi - lo) / static_cast<double>(points - 1);
  return RegionGrid{lo, hi, lo, hi, step};
}

std::size_t RegionGrid::columns() const { return axis_count(re_min, re_max, step); }
std::size_t RegionGrid::rows() const { return axis_count(im_min, im_max, step); }

RegionMap region_scan(const SpectrumBounds& bounds, const RegionGrid& grid, unsigned threads) {
  RegionMap map;
  map.bounds = bounds;
  map.acceleration = optimal_coefficient(bounds);
  map.grid = grid;

  const std::size_t cols = grid.columns();
  const std::size_t rows = grid.rows();
  map.points.resize(rows * cols);

  const double c = map.acceleration.c_star;
  const double limit = map.acceleration.r_star + kRegionValidityTolerance;
  const auto fill_rows = [&](std::size_t first, std::size_t last) {
    for (std::size_t r = first; r < last; ++r) {
      for (std::size_t col = 0; col < cols; ++col) {
        RegionPoint& p = map.points[r * cols + col];
        p.re = grid.re(col);
        p.im = grid.im(r);
        const Complex b(p.re, p.im);
        p.nesterov_rate = rate_complex(c, b);
        p.cheb_rate = chebyshev_asymptotic_rate(bounds, b);
        p.nesterov_valid = p.nesterov_rate <= limit;
        p.cheb_valid = p.cheb_rate <= limit;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, rows));
  if (threads <= 1) {
    fill_rows(0, rows);
    return map;
  }
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (rows + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t first = t * chunk;
      const std::size_t last = std::min(rows, first + chunk);
      if (first >= last) break;
      workers.emplace_back(fill_rows, first, last);
    }
  }
  return map;
}

void write_region_csv(std::ostream& out, const RegionMap& map) {
  out << "re,im,nesterov_rate,cheb_rate,nesterov_valid,cheb_valid\n";
  char line[160];
  for (const auto& p : map.points) {
    std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%d,%d\n", p.re, p.im, p.nesterov_rate,
                  p.cheb_rate, p.nesterov_valid ? 1 : 0, p.cheb_valid ? 1 : 0);
    out << line;
  }
}

}  // namespace nestersolve
