// Copyright 2026 The quantsyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quantsyn/models.hpp"

#include <cmath>

namespace quantsyn {

namespace {

LinearExpression c(const Rational& v) { return LinearExpression(v); }
LinearExpression v(VarId id) { return LinearExpression::variable(id); }

Region box_region(const std::vector<VarId>& x, const std::vector<Interval>& bounds) {
  Region r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.push_back(make_le(v(x[i]), c(bounds[i].hi)));
    r.push_back(make_le(c(bounds[i].lo), v(x[i])));
  }
  return r;
}

Rational round6(double d) { return round_to(d, 1000000); }

}  // namespace

Rational pendulum_pi() { return Rational(355, 113); }

std::vector<SinBounds> sin_bounds(const Rational& margin) {
  const Rational pi = pendulum_pi();
  const double pid = to_double(pi);
  std::vector<SinBounds> out;
  for (int k = 0; k < 4; ++k) {
    const Rational lo = pi * Rational(k - 2, 2);
    const Rational hi = pi * Rational(k - 1, 2);
    const double a = pid * (k - 2) / 2.0;
    const double b = pid * (k - 1) / 2.0;
    const double chord_slope = (std::sin(b) - std::sin(a)) / (b - a);
    const double chord_offset = std::sin(a) - chord_slope * a;
    const double mid = (a + b) / 2;
    const double tangent_slope = std::cos(mid);
    const double tangent_offset = std::sin(mid) - tangent_slope * mid;
    SinBounds s;
    s.domain = {lo, hi};
    // sin is convex on [-pi, 0] and concave on [0, pi].
    const bool convex = k < 2;
    const double ls = convex ? tangent_slope : chord_slope;
    const double lo_off = convex ? tangent_offset : chord_offset;
    const double us = convex ? chord_slope : tangent_slope;
    const double up_off = convex ? chord_offset : tangent_offset;
    s.lower_slope = round6(ls);
    s.lower_offset = round6(lo_off) - margin;
    s.upper_slope = round6(us);
    s.upper_offset = round6(up_off) + margin;
    out.push_back(std::move(s));
  }
  return out;
}

ModelInstance pendulum_model(const Rational& force, const Rational& sampling, unsigned bits,
                             const Rational& rho) {
  if (force <= 0 || sampling <= 0) throw UsageError("force and sampling time must be positive");
  const Rational pi = pendulum_pi();
  const Rational wide = pi * Rational(11, 10);
  DtlhsBuilder b;
  const VarId x1 = b.state("x1", -wide, wide);
  const VarId x2 = b.state("x2", Rational(-4), Rational(4));
  const VarId u = b.input("u", Sort::integer, Rational(-1), Rational(1));
  const VarId yk = b.aux("yk", Sort::integer, Rational(-1), Rational(1));
  const VarId yq = b.aux("yq", Sort::integer, Rational(-1), Rational(1));
  const VarId ya = b.aux("yalpha", Sort::real, -pi, pi);
  const VarId ys = b.aux("ysin", Sort::real, Rational(-2), Rational(2));
  std::vector<VarId> y;
  for (int i = 1; i <= 4; ++i) y.push_back(b.aux("y" + std::to_string(i), Sort::boolean, Rational(0), Rational(1)));

  b.eq(v(b.next(x1)), v(x1) + v(yq) * (2 * pi) + v(x2) * sampling);
  b.eq(v(b.next(x2)), v(x2) + v(ys) * sampling + v(u) * (sampling * force));
  const auto bounds = sin_bounds();
  for (int i = 0; i < 4; ++i) {
    const SinBounds& s = bounds[i];
    b.le(y[i], true, v(ya) * s.lower_slope + c(s.lower_offset), v(ys));
    b.le(y[i], true, v(ys), v(ya) * s.upper_slope + c(s.upper_offset));
    b.ge(y[i], true, v(ya), c(s.domain.lo));
    b.le(y[i], true, v(ya), c(s.domain.hi));
  }
  b.ge(v(y[0]) + v(y[1]) + v(y[2]) + v(y[3]), c(Rational(1)));
  b.eq(v(x1), v(yk) * (2 * pi) + v(ya));
  b.ge(v(b.next(x1)), c(-pi));
  b.le(v(b.next(x1)), c(pi));

  Dtlhs h = b.build();
  Quantization q(h, {Quantizer::uniform({-wide, wide}, bits), Quantizer::uniform({Rational(-4), Rational(4)}, bits)});
  Region init = box_region({x1, x2}, {{-pi, pi}, {Rational(-4), Rational(4)}});
  Region goal = box_region({x1, x2}, {{-rho, rho}, {-rho, rho}});
  return {"pendulum", std::move(h), std::move(q), std::move(init), std::move(goal), sampling};
}

std::vector<std::vector<Rational>> buck_coefficients(const BuckParameters& p) {
  const Rational& L = p.inductance;
  const Rational& R = p.load;
  const Rational& rc = p.r_c;
  const Rational& rl = p.r_l;
  const Rational& C = p.capacitance;
  std::vector<std::vector<Rational>> a(2, std::vector<Rational>(3));
  a[0][0] = -rl / L;
  a[0][1] = -1 / L;
  a[0][2] = -1 / L;
  a[1][0] = R / (rc + R) * (-(rc * rl) / L + 1 / C);
  a[1][1] = -1 / (rc + R) * (rc * R / L + 1 / C);
  a[1][2] = -1 / L * (rc * R / (rc + R));
  return a;
}

ModelInstance buck_model(unsigned inputs, const Rational& sampling, unsigned bits, const Rational& rho,
                         const BuckParameters& p) {
  if (inputs == 0) throw UsageError("the buck converter needs at least one input");
  if (sampling <= 0) throw UsageError("sampling time must be positive");
  const unsigned n = inputs;
  // Every current is within the inductor range plus the leakage through the
  // open switches, and every voltage is r_off times some current.
  const Rational imax(100);
  const Rational vmax = imax * std::max(p.r_off, Rational(1));
  DtlhsBuilder b;
  const VarId il = b.state("iL", Rational(-4), Rational(4));
  const VarId vo = b.state("vO", Rational(-1), Rational(7));
  std::vector<VarId> u, q, vdi, iu, vu;
  for (unsigned j = 1; j <= n; ++j) u.push_back(b.input("u" + std::to_string(j), Sort::boolean, Rational(0), Rational(1)));
  for (unsigned i = 0; i < n; ++i) q.push_back(b.aux("q" + std::to_string(i), Sort::boolean, Rational(0), Rational(1)));
  const VarId vd = b.aux("vD", Sort::real, -vmax, vmax);
  const VarId id = b.aux("iD", Sort::real, -imax, imax);
  for (unsigned i = 1; i < n; ++i) vdi.push_back(b.aux("vD" + std::to_string(i), Sort::real, -vmax, vmax));
  for (unsigned j = 1; j <= n; ++j) iu.push_back(b.aux("Iu" + std::to_string(j), Sort::real, -imax, imax));
  for (unsigned j = 1; j <= n; ++j) vu.push_back(b.aux("vu" + std::to_string(j), Sort::real, -vmax, vmax));

  const auto a = buck_coefficients(p);
  const Rational& T = sampling;
  b.eq(v(b.next(il)), v(il) * (1 + T * a[0][0]) + v(vo) * (T * a[0][1]) + v(vd) * (T * a[0][2]));
  b.eq(v(b.next(vo)), v(il) * (T * a[1][0]) + v(vo) * (1 + T * a[1][1]) + v(vd) * (T * a[1][2]));

  b.eq(q[0], true, v(vd), v(id) * p.r_on);
  b.eq(q[0], false, v(vd), v(id) * p.r_off);
  b.ge(q[0], true, v(id), c(Rational(0)));
  b.le(q[0], false, v(vd), c(Rational(0)));
  b.eq(v(vd), v(vu[n - 1]) - c(p.voltage_step * n));
  LinearExpression currents = v(id);
  for (VarId i : iu) currents += v(i);
  b.eq(v(il), currents);
  for (unsigned i = 1; i < n; ++i) {
    b.eq(q[i], true, v(vdi[i - 1]), v(iu[i - 1]) * p.r_on);
    b.eq(q[i], false, v(vdi[i - 1]), v(iu[i - 1]) * p.r_off);
    b.ge(q[i], true, v(iu[i - 1]), c(Rational(0)));
    b.le(q[i], false, v(vdi[i - 1]), c(Rational(0)));
    b.eq(v(vd), v(vu[i - 1]) + v(vdi[i - 1]) - c(p.voltage_step * i));
  }
  for (unsigned j = 0; j < n; ++j) {
    b.eq(u[j], true, v(vu[j]), v(iu[j]) * p.r_on);
    b.eq(u[j], false, v(vu[j]), v(iu[j]) * p.r_off);
  }

  Dtlhs h = b.build();
  Quantization qz(h, {Quantizer::uniform({Rational(-4), Rational(4)}, bits),
                      Quantizer::uniform({Rational(-1), Rational(7)}, bits)});
  Region init = box_region({il, vo}, {{Rational(-2), Rational(2)}, {Rational(0), Rational(13, 2)}});
  Region goal = box_region({il, vo}, {{Rational(-2), Rational(2)}, {5 - rho, 5 + rho}});
  return {"buck" + std::to_string(n), std::move(h), std::move(qz), std::move(init), std::move(goal), sampling};
}

ModelInstance scalar_model(const Rational& sampling, const Rational& eps, unsigned bits) {
  if (sampling <= 0 || eps <= 0) throw UsageError("sampling time and goal radius must be positive");
  if (!(sampling < eps / 10)) throw UsageError("scalar model needs T < eps / 10");
  if (bits > 16) throw UsageError("scalar quantizer resolution must be at most 16 bits");
  const Rational lo(-2), hi(5, 2);
  DtlhsBuilder b;
  const VarId x = b.state("x", lo, hi);
  const VarId u = b.input("u", Sort::boolean, Rational(0), Rational(1));
  b.eq(u, false, v(b.next(x)), v(x) + (c(Rational(5, 4)) - v(x)) * sampling);
  b.eq(u, true, v(b.next(x)), v(x) + (v(x) - c(Rational(3, 2))) * sampling);
  Dtlhs h = b.build();
  const Rational scale(std::int64_t{1} << bits);
  Quantization q(h, {Quantizer::floor_scaled({lo, hi}, scale)});
  Region init = box_region({x}, {{lo, hi}});
  Region goal = box_region({x}, {{-eps, eps}});
  return {"scalar", std::move(h), std::move(q), std::move(init), std::move(goal), sampling};
}

}  // namespace quantsyn
