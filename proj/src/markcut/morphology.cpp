#include "markcut/morphology.h"

#include <cmath>
#include <limits>

namespace markcut::morph {

Components label_components(const Mask& mask, bool eight) {
  Components c{Raster<int>(mask.width(), mask.height(), 0), 0};
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y) || c.labels(x, y)) continue;
      const int id = ++c.count;
      c.labels(x, y) = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (!dx && !dy) continue;
            if (!eight && dx && dy) continue;
            const int nx = px + dx, ny = py + dy;
            if (mask.in_bounds(nx, ny) && mask(nx, ny) && !c.labels(nx, ny)) {
              c.labels(nx, ny) = id;
              stack.push_back({nx, ny});
            }
          }
        }
      }
    }
  }
  return c;
}

namespace {

std::vector<std::pair<int, int>> disk(int r) {
  std::vector<std::pair<int, int>> off;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r * r) off.push_back({dx, dy});
  return off;
}

// Erosion treats out-of-raster pixels as background.
Mask apply(const Mask& m, int r, bool erode_op) {
  const auto off = disk(r);
  Mask out(m.width(), m.height(), 0);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool v = erode_op;
      for (auto [dx, dy] : off) {
        const int nx = x + dx, ny = y + dy;
        const bool s = m.in_bounds(nx, ny) && m(nx, ny);
        if (erode_op && !s) { v = false; break; }
        if (!erode_op && s) { v = true; break; }
      }
      out(x, y) = v;
    }
  }
  return out;
}

// 1D lower envelope of parabolas over f; writes squared distance and source index.
void envelope_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& src,
                 std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    while (k >= 0) {
      const int p = v[k];
      const double s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf
                  : ((f[q] + double(q) * q) - (f[v[k - 1]] + double(v[k - 1]) * v[k - 1])) /
                        (2.0 * q - 2.0 * v[k - 1]);
    z[k + 1] = inf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) { d[q] = inf; src[q] = -1; }
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
    src[q] = v[j];
  }
}

}  // namespace

Mask erode(const Mask& m, int r) { return apply(m, r, true); }
Mask dilate(const Mask& m, int r) { return apply(m, r, false); }
Mask open(const Mask& m, int r) { return dilate(erode(m, r), r); }
Mask close(const Mask& m, int r) { return erode(dilate(m, r), r); }

Raster<double> squared_distance_to_sites(const Mask& sites, std::vector<std::int64_t>* nearest) {
  const int w = sites.width(), h = sites.height();
  constexpr double inf = std::numeric_limits<double>::infinity();
  Raster<double> out(w, h, inf);
  Raster<int> row_src(w, h, -1);  // column index of the nearest site after pass 1
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> src(n), v(n);

  // Pass 1: along columns.
  for (int x = 0; x < w; ++x) {
    f.assign(h, inf); d.resize(h); src.resize(h);
    for (int y = 0; y < h; ++y) f[y] = sites(x, y) ? 0.0 : inf;
    envelope_1d(f, d, src, v, z);
    for (int y = 0; y < h; ++y) {
      out(x, y) = d[y];
      row_src(x, y) = src[y];
    }
  }
  // Pass 2: along rows.
  for (int y = 0; y < h; ++y) {
    f.assign(w, inf); d.resize(w); src.resize(w);
    for (int x = 0; x < w; ++x) f[x] = out(x, y);
    envelope_1d(f, d, src, v, z);
    for (int x = 0; x < w; ++x) {
      out(x, y) = d[x];
      if (nearest) {
        if (nearest->size() != out.size()) nearest->assign(out.size(), -1);
        const int sx = src[x];
        (*nearest)[static_cast<std::size_t>(y) * w + x] =
            sx < 0 ? -1 : static_cast<std::int64_t>(row_src(sx, y)) * w + sx;
      }
    }
  }
  return out;
}

Raster<double> distance_inside(const Mask& region) {
  const int w = region.width(), h = region.height();
  Mask outside(w + 2, h + 2, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) outside(x + 1, y + 1) = region(x, y) ? 0 : 1;
  const Raster<double> sq = squared_distance_to_sites(outside);
  Raster<double> out(w, h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (region(x, y)) out(x, y) = std::sqrt(sq(x + 1, y + 1));
  return out;
}

Mask thin(const Mask& input) {
  Mask m = input;
  const int w = m.width(), h = m.height();
  auto at = [&](int x, int y) -> int { return m.in_bounds(x, y) && m(x, y) ? 1 : 0; };
  std::vector<std::size_t> kill;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      kill.clear();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!m(x, y)) continue;
          // P2..P9 clockwise from north
          const int p[8] = {at(x, y - 1), at(x + 1, y - 1), at(x + 1, y), at(x + 1, y + 1),
                            at(x, y + 1), at(x - 1, y + 1), at(x - 1, y), at(x - 1, y - 1)};
          int b = 0, a = 0;
          for (int i = 0; i < 8; ++i) {
            b += p[i];
            if (!p[i] && p[(i + 1) % 8]) ++a;
          }
          if (b < 2 || b > 6 || a != 1) continue;
          if (pass == 0) {
            if ((p[0] && p[2] && p[4]) || (p[2] && p[4] && p[6])) continue;
          } else {
            if ((p[0] && p[2] && p[6]) || (p[0] && p[4] && p[6])) continue;
          }
          kill.push_back(static_cast<std::size_t>(y) * w + x);
        }
      }
      for (std::size_t i : kill) m[i] = 0;
      if (!kill.empty()) changed = true;
    }
  }
  return m;
}

}  // namespace markcut::morph
