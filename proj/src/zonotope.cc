// Copyright 2026 The dpzono Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpzono/zonotope.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpzono {

Zonotope::Zonotope(Vector center, Matrix generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
  if (generators_.cols() == 0 && generators_.rows() != center_.size()) {
    generators_.resize(center_.size(), 0);
  }
  if (generators_.rows() != center_.size()) {
    throw std::invalid_argument(
        "Zonotope: center has dimension " + std::to_string(center_.size()) +
        " but generator matrix has " + std::to_string(generators_.rows()) +
        " rows");
  }
  if (!center_.allFinite() || !generators_.allFinite()) {
    throw std::invalid_argument("Zonotope: non-finite entry");
  }
}

Zonotope Zonotope::Point(Vector center) {
  const Eigen::Index n = center.size();
  return Zonotope(std::move(center), Matrix(n, 0));
}

Zonotope LinearMap(const Matrix& map, const Zonotope& z) {
  if (map.cols() != z.dimension()) {
    throw std::invalid_argument("LinearMap: matrix has " +
                                std::to_string(map.cols()) +
                                " columns, zonotope dimension is " +
                                std::to_string(z.dimension()));
  }
  return Zonotope(map * z.center(), map * z.generators());
}

Zonotope MinkowskiSum(const Zonotope& lhs, const Zonotope& rhs) {
  if (lhs.dimension() != rhs.dimension()) {
    throw std::invalid_argument("MinkowskiSum: dimension mismatch");
  }
  Matrix g(lhs.dimension(), lhs.num_generators() + rhs.num_generators());
  g << lhs.generators(), rhs.generators();
  return Zonotope(lhs.center() + rhs.center(), std::move(g));
}

Zonotope CartesianProduct(const Zonotope& lhs, const Zonotope& rhs) {
  const Eigen::Index n = lhs.dimension();
  const Eigen::Index m = rhs.dimension();
  Vector c(n + m);
  c << lhs.center(), rhs.center();
  Matrix g = Matrix::Zero(n + m, lhs.num_generators() + rhs.num_generators());
  g.topLeftCorner(n, lhs.num_generators()) = lhs.generators();
  g.bottomRightCorner(m, rhs.num_generators()) = rhs.generators();
  return Zonotope(std::move(c), std::move(g));
}

IntervalBox IntervalHull(const Zonotope& z) {
  const Vector radius = z.generators().cwiseAbs().rowwise().sum();
  return IntervalBox{z.center() - radius, z.center() + radius};
}

Zonotope ReduceOrder(const Zonotope& z, int order) {
  if (order < 1) {
    throw std::invalid_argument("ReduceOrder: order must be >= 1");
  }
  const Eigen::Index n = z.dimension();
  const Eigen::Index count = z.num_generators();
  if (count <= order * n) return z;

  const Matrix& g = z.generators();
  std::vector<double> score(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    score[i] = g.col(i).lpNorm<1>() - g.col(i).lpNorm<Eigen::Infinity>();
  }
  std::vector<Eigen::Index> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return score[a] < score[b];
  });

  const Eigen::Index reduced = count - n * (order - 1);
  Vector box = Vector::Zero(n);
  for (Eigen::Index i = 0; i < reduced; ++i) {
    box += g.col(idx[i]).cwiseAbs();
  }
  // Kept generators stay in their original column order.
  std::vector<Eigen::Index> kept(idx.begin() + reduced, idx.end());
  std::sort(kept.begin(), kept.end());

  Matrix out(n, order * n);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kept.size()); ++j) {
    out.col(j) = g.col(kept[j]);
  }
  out.rightCols(n) = box.asDiagonal();
  return Zonotope(z.center(), std::move(out));
}

bool ContainsPoint(const Zonotope& z, const Vector& x) {
  if (z.dimension() != 2 || x.size() != 2) {
    throw std::invalid_argument("ContainsPoint: only planar zonotopes");
  }
  const Matrix& g = z.generators();
  double scale = z.center().lpNorm<Eigen::Infinity>();
  for (Eigen::Index i = 0; i < g.cols(); ++i) {
    scale += g.col(i).lpNorm<Eigen::Infinity>();
  }
  const double tol = 1e-9 * std::max(1.0, scale);
  const Vector offset = x - z.center();

  // Support-function test in unit direction u.
  auto within = [&](const Eigen::Vector2d& u) {
    const double support = (u.transpose() * g).cwiseAbs().sum();
    return std::abs(u.dot(offset)) <= support + tol;
  };

  if (!within({1.0, 0.0}) || !within({0.0, 1.0})) return false;
  for (Eigen::Index i = 0; i < g.cols(); ++i) {
    const double norm = g.col(i).norm();
    if (norm == 0.0) continue;
    const Eigen::Vector2d dir = g.col(i) / norm;
    if (!within(dir) || !within({-dir.y(), dir.x()})) return false;
  }
  return true;
}

Vector SamplePoint(const Zonotope& z, RandomStream& rng) {
  Vector beta(z.num_generators());
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    beta[i] = rng.Uniform(-1.0, 1.0);
  }
  return z.center() + z.generators() * beta;
}

}  // namespace dpzono
