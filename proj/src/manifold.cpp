#include "bdq/manifold.hpp"

#include <cmath>
#include <cstring>

namespace bdq {

namespace {
const double kSqrt2 = std::sqrt(2.0);

void require_same_dims(const FactorPair& x, const TangentPair& v, const char* where) {
  if (x.h.size() != v.dh.size() || x.m.size() != v.dm.size())
    throw DimensionError(std::string(where) + ": tangent dimensions do not match base point");
}
}  // namespace

void validate_factor_pair(const FactorPair& x) {
  if (x.h.size() == 0 || x.m.size() == 0) throw ManifoldError("factor pair: empty factor");
  require_finite(x.h, "factor h");
  require_finite(x.m, "factor m");
  if (x.h.norm() == 0.0 || x.m.norm() == 0.0)
    throw ManifoldError("factor pair: zero factor is not on the manifold");
}

double metric(const FactorPair& x, const TangentPair& a, const TangentPair& b) {
  require_same_dims(x, a, "metric");
  require_same_dims(x, b, "metric");
  double m2 = x.m.squaredNorm();
  double h2 = x.h.squaredNorm();
  return a.dh.dot(b.dh).real() * m2 + a.dm.dot(b.dm).real() * h2;
}

double metric(const HorizontalVector& a, const HorizontalVector& b) {
  auto same = [](const ComplexVector& p, const ComplexVector& q) {
    return p.size() == q.size() &&
           std::memcmp(p.data(), q.data(), sizeof(Complex) * p.size()) == 0;
  };
  if (!same(a.base.h, b.base.h) || !same(a.base.m, b.base.m))
    throw ManifoldError("metric: vectors anchored at different base points");
  return metric(a.base, a.tangent(), b.tangent());
}

double metric_norm2(const FactorPair& x, const TangentPair& a) { return metric(x, a, a); }

Complex vertical_component(const FactorPair& x, const TangentPair& v) {
  require_same_dims(x, v, "vertical_component");
  Complex num_m = v.dm.dot(x.m);  // v_m^* m
  Complex num_h = x.h.dot(v.dh);  // h^* v_h
  return 0.5 * (num_m / x.m.squaredNorm() - num_h / x.h.squaredNorm());
}

TangentPair vertical_project(const FactorPair& x, const TangentPair& v) {
  Complex lambda = vertical_component(x, v);
  return {-x.h * lambda, x.m * std::conj(lambda)};
}

TangentPair horizontal_project(const FactorPair& x, const TangentPair& v) {
  TangentPair pv = vertical_project(x, v);
  return {v.dh - pv.dh, v.dm - pv.dm};
}

bool is_horizontal(const FactorPair& x, const TangentPair& v, double tol) {
  TangentPair pv = vertical_project(x, v);
  double scale = std::sqrt(metric_norm2(x, v)) + 1e-300;
  return std::sqrt(metric_norm2(x, pv)) <= tol * scale;
}

HorizontalVector make_horizontal(const FactorPair& x, TangentPair v, double tol) {
  validate_factor_pair(x);
  require_same_dims(x, v, "make_horizontal");
  if (!is_horizontal(x, v, tol))
    throw ManifoldError("make_horizontal: vector has a nonzero vertical component");
  return HorizontalVector{x, std::move(v.dh), std::move(v.dm)};
}

FactorPair retract(const FactorPair& x, const TangentPair& eta) {
  require_same_dims(x, eta, "retract");
  FactorPair y{x.h + eta.dh, x.m + eta.dm};
  if (y.h.norm() == 0.0 || y.m.norm() == 0.0)
    throw ManifoldError("retract: step leaves the manifold (a factor became zero)");
  return y;
}

FactorPair balance(const FactorPair& x) {
  validate_factor_pair(x);
  double nh = x.h.norm();
  double nm = x.m.norm();
  double s = std::sqrt(nh * nm);
  return {x.h * (s / nh), x.m * (s / nm)};
}

bool is_balanced(const FactorPair& x, double tol) {
  double nh = x.h.norm();
  double nm = x.m.norm();
  return std::abs(nh - nm) <= tol * std::max(nh, nm);
}

Reflector make_reflector(const ComplexVector& h) {
  Reflector r;
  double nh = h.norm();
  Complex h1 = h[0];
  Complex sign = (h1 == Complex(0.0, 0.0)) ? Complex(1.0, 0.0) : h1 / std::abs(h1);
  ComplexVector v = h;
  v[0] -= sign * nh;
  double vn2 = v.squaredNorm();
  if (vn2 == 0.0) return r;  // h is already along e_1: P = I
  r.v = std::move(v);
  r.vnorm2 = vn2;
  r.identity = false;
  return r;
}

ComplexVector reflect(const Reflector& r, const ComplexVector& x) {
  if (r.identity) return x;
  Complex coeff = 2.0 * r.v.dot(x) / r.vnorm2;
  return x - coeff * r.v;
}

std::vector<TangentPair> build_basis(const FactorPair& x) {
  validate_factor_pair(x);
  const Eigen::Index K = x.h.size();
  const Eigen::Index N = x.m.size();
  const double nh = x.h.norm();
  const double nm = x.m.norm();
  const Complex i_unit(0.0, 1.0);

  std::vector<TangentPair> basis;
  basis.reserve(2 * (K + N) - 2);

  ComplexVector hd = x.h / (nh * nm);
  ComplexVector md = x.m / (nm * nh);
  ComplexVector zk = ComplexVector::Zero(K);
  ComplexVector zn = ComplexVector::Zero(N);

  basis.push_back({hd / kSqrt2, md / kSqrt2});
  basis.push_back({i_unit * hd / kSqrt2, -i_unit * md / kSqrt2});

  // block layout matching the intrinsic coordinates: real h-perp vectors,
  // imaginary h-perp vectors, then the same for m
  Reflector rh = make_reflector(x.h);
  std::vector<ComplexVector> hperp;
  for (Eigen::Index j = 1; j < K; ++j) {
    ComplexVector ej = ComplexVector::Zero(K);
    ej[j] = 1.0;
    hperp.push_back(reflect(rh, ej));  // column j of the Householder matrix
  }
  for (const auto& hp : hperp) basis.push_back({hp / nm, zn});
  for (const auto& hp : hperp) basis.push_back({i_unit * hp / nm, zn});

  Reflector rm = make_reflector(x.m);
  std::vector<ComplexVector> mperp;
  for (Eigen::Index j = 1; j < N; ++j) {
    ComplexVector ej = ComplexVector::Zero(N);
    ej[j] = 1.0;
    mperp.push_back(reflect(rm, ej));
  }
  for (const auto& mp : mperp) basis.push_back({zk, mp / nh});
  for (const auto& mp : mperp) basis.push_back({zk, i_unit * mp / nh});
  return basis;
}

RealVector to_intrinsic(const FactorPair& x, const TangentPair& xi) {
  validate_factor_pair(x);
  require_same_dims(x, xi, "to_intrinsic");
  const Eigen::Index K = x.h.size();
  const Eigen::Index N = x.m.size();
  const double nh = x.h.norm();
  const double nm = x.m.norm();

  RealVector c(2 * (K + N) - 2);
  Complex a = x.h.dot(xi.dh);  // h^* xi_h
  Complex b = x.m.dot(xi.dm);  // m^* xi_m
  c[0] = (a.real() * nm / nh + b.real() * nh / nm) / kSqrt2;
  c[1] = (a.imag() * nm / nh - b.imag() * nh / nm) / kSqrt2;

  Reflector rh = make_reflector(x.h);
  ComplexVector ph = reflect(rh, xi.dh);  // P is Hermitian: row j dot xi
  for (Eigen::Index j = 1; j < K; ++j) {
    c[2 + (j - 1)] = ph[j].real() * nm;
    c[2 + (K - 1) + (j - 1)] = ph[j].imag() * nm;
  }

  Reflector rm = make_reflector(x.m);
  ComplexVector pm = reflect(rm, xi.dm);
  const Eigen::Index off = 2 + 2 * (K - 1);
  for (Eigen::Index j = 1; j < N; ++j) {
    c[off + (j - 1)] = pm[j].real() * nh;
    c[off + (N - 1) + (j - 1)] = pm[j].imag() * nh;
  }
  return c;
}

TangentPair from_intrinsic(const FactorPair& x, const RealVector& coords) {
  validate_factor_pair(x);
  const Eigen::Index K = x.h.size();
  const Eigen::Index N = x.m.size();
  require(coords.size() == 2 * (K + N) - 2, "from_intrinsic: wrong coordinate dimension");
  const double nh = x.h.norm();
  const double nm = x.m.norm();

  Complex ab(coords[0], coords[1]);
  TangentPair xi;
  xi.dh = (ab / kSqrt2) * x.h / (nh * nm);
  xi.dm = (std::conj(ab) / kSqrt2) * x.m / (nm * nh);

  ComplexVector zh = ComplexVector::Zero(K);
  for (Eigen::Index j = 1; j < K; ++j)
    zh[j] = Complex(coords[2 + (j - 1)], coords[2 + (K - 1) + (j - 1)]) / nm;
  Reflector rh = make_reflector(x.h);
  xi.dh += reflect(rh, zh);

  ComplexVector zm = ComplexVector::Zero(N);
  const Eigen::Index off = 2 + 2 * (K - 1);
  for (Eigen::Index j = 1; j < N; ++j)
    zm[j] = Complex(coords[off + (j - 1)], coords[off + (N - 1) + (j - 1)]) / nh;
  Reflector rm = make_reflector(x.m);
  xi.dm += reflect(rm, zm);
  return xi;
}

TangentPair transport(const FactorPair& x, const TangentPair& eta_move, const TangentPair& xi) {
  FactorPair y = retract(x, eta_move);
  return from_intrinsic(y, to_intrinsic(x, xi));
}

}  // namespace bdq
