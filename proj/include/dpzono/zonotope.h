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

#ifndef DPZONO_ZONOTOPE_H_
#define DPZONO_ZONOTOPE_H_

#include <Eigen/Dense>

#include "dpzono/random.h"

namespace dpzono {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Zonotope <c, G> = { c + G*beta : |beta|_inf <= 1 }.
//
// The generator matrix is n x gamma with gamma >= 0; a zonotope without
// generators is a single point. Construction rejects mismatched dimensions
// and non-finite entries with std::invalid_argument.
class Zonotope {
 public:
  // Zero-dimensional set; placeholder until assigned.
  Zonotope() : center_(Vector::Zero(0)), generators_(Matrix::Zero(0, 0)) {}
  Zonotope(Vector center, Matrix generators);

  static Zonotope Point(Vector center);

  const Vector& center() const { return center_; }
  const Matrix& generators() const { return generators_; }
  Eigen::Index dimension() const { return center_.size(); }
  Eigen::Index num_generators() const { return generators_.cols(); }

 private:
  Vector center_;
  Matrix generators_;
};

struct IntervalBox {
  Vector lower;
  Vector upper;
};

// <M c, M G>.
Zonotope LinearMap(const Matrix& map, const Zonotope& z);

// <c1 + c2, [G1, G2]>.
Zonotope MinkowskiSum(const Zonotope& lhs, const Zonotope& rhs);

// <[c1; c2], blkdiag(G1, G2)>.
Zonotope CartesianProduct(const Zonotope& lhs, const Zonotope& rhs);

// Tight axis-aligned box around z.
IntervalBox IntervalHull(const Zonotope& z);

// Girard order reduction to at most `order` * n generators. Generators are
// ranked by |g|_1 - |g|_inf (stable, ties keep column order); the
// gamma - n*(order-1) smallest are replaced by their interval hull. The
// result always contains z. Throws std::invalid_argument if order < 1.
Zonotope ReduceOrder(const Zonotope& z, int order);

// Exact membership test for planar zonotopes via support functions over the
// generator normals, generator directions and coordinate axes. The tolerance
// is 1e-9 * max(1, |c|_inf + sum_i |g_i|_inf). Throws for dimension != 2.
bool ContainsPoint(const Zonotope& z, const Vector& x);

// c + G*beta with beta uniform on [-1, 1]^gamma.
Vector SamplePoint(const Zonotope& z, RandomStream& rng);

}  // namespace dpzono

#endif  // DPZONO_ZONOTOPE_H_
