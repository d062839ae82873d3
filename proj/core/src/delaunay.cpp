#include "ngar/delaunay.hpp"

#include "ngar/errors.hpp"

namespace ngar {
namespace {

struct Point {
  double x;
  double y;
};

double orient(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 iff d lies strictly inside the circle through a, b, c (counter-clockwise).
double in_circle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return adx * (bdy * clift - blift * cdy) - ady * (bdx * clift - blift * cdx) +
         alift * (bdx * cdy - bdy * cdx);
}

}  // namespace

Adjacency delaunay_adjacency(const Matrix& points) {
  if (points.cols() != 2) throw InvalidInput("Delaunay topology needs 2-dimensional points");
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw InvalidInput("Delaunay topology needs at least one point");
  Adjacency adjacency = Adjacency::Zero(n, n);

  std::vector<Point> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[i] = {points(i, 0), points(i, 1)};

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const double o = orient(p[i], p[j], p[k]);
        if (o == 0.0) continue;
        const bool ccw = o > 0.0;
        bool empty = true;
        for (int m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          const double inside = ccw ? in_circle(p[i], p[j], p[k], p[m])
                                    : in_circle(p[i], p[k], p[j], p[m]);
          if (inside > 0.0) empty = false;
        }
        if (!empty) continue;
        adjacency(i, j) = adjacency(j, i) = 1;
        adjacency(i, k) = adjacency(k, i) = 1;
        adjacency(j, k) = adjacency(k, j) = 1;
      }
    }
  }
  return adjacency;
}

}  // namespace ngar
