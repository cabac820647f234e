#pragma once

#include <vector>

#include "bdq/types.hpp"

namespace bdq {

/// A representative (h, m) of the equivalence class pi(h, m) on
/// C_*^K x C_*^N / C_*. Both factors must be nonzero.
struct FactorPair {
  ComplexVector h;
  ComplexVector m;
};

void validate_factor_pair(const FactorPair& x);

/// An arbitrary tangent direction at a representative (not necessarily
/// horizontal).
struct TangentPair {
  ComplexVector dh;
  ComplexVector dm;
};

/// A tangent direction satisfying the horizontality condition at its base
/// point (the unique lift of a quotient tangent vector).
struct HorizontalVector {
  FactorPair base;
  ComplexVector dh;
  ComplexVector dm;

  TangentPair tangent() const { return {dh, dm}; }
};

HorizontalVector make_horizontal(const FactorPair& x, TangentPair v, double tol = 1e-8);

/// Riemannian metric g((a_h,a_m),(b_h,b_m)) = Re(a_h^* b_h)||m||^2 +
/// Re(a_m^* b_m)||h||^2.
double metric(const FactorPair& x, const TangentPair& a, const TangentPair& b);
double metric(const HorizontalVector& a, const HorizontalVector& b);
double metric_norm2(const FactorPair& x, const TangentPair& a);

/// Lambda of the vertical projection: P^v(v) = (-h Lambda, m Lambda^*) with
/// Lambda = 0.5( (v_m^* m)/(m^* m) - (h^* v_h)/(h^* h) ). Horizontal vectors
/// are exactly those with Lambda = 0.
Complex vertical_component(const FactorPair& x, const TangentPair& v);
TangentPair vertical_project(const FactorPair& x, const TangentPair& v);
TangentPair horizontal_project(const FactorPair& x, const TangentPair& v);
bool is_horizontal(const FactorPair& x, const TangentPair& v, double tol = 1e-10);

/// R_x(eta) = (h + eta_h, m + eta_m); throws ManifoldError when the result
/// leaves C_*^K x C_*^N.
FactorPair retract(const FactorPair& x, const TangentPair& eta);

/// Rescale the representative so ||h|| = ||m|| = sqrt(||h|| ||m||); the
/// product h m^* and the equivalence class are unchanged.
FactorPair balance(const FactorPair& x);
bool is_balanced(const FactorPair& x, double tol = 1e-12);

/// Ordered g-orthonormal basis of the horizontal space; 2(K+N)-2 vectors.
/// Order matches the intrinsic coordinate layout.
std::vector<TangentPair> build_basis(const FactorPair& x);

/// Intrinsic coordinates of a horizontal vector in the basis above; O(K+N)
/// via the Householder reflector, mutually inverse with from_intrinsic.
RealVector to_intrinsic(const FactorPair& x, const TangentPair& xi);
TangentPair from_intrinsic(const FactorPair& x, const RealVector& coords);

/// Vector transport by parallelization: identity on intrinsic coordinates,
/// carrying xi from x to retract(x, eta_move).
TangentPair transport(const FactorPair& x, const TangentPair& eta_move, const TangentPair& xi);

/// Householder reflector P = I - 2 v v^*/||v||^2 with v = h - sign(h_1)||h|| e_1
/// (sign(0) = 1). P is unitary Hermitian, P h = sign(h_1)||h|| e_1, and its
/// trailing columns span the orthogonal complement of h. Degenerates to the
/// identity when v = 0.
struct Reflector {
  ComplexVector v;
  double vnorm2 = 0.0;
  bool identity = true;
};

Reflector make_reflector(const ComplexVector& h);
ComplexVector reflect(const Reflector& r, const ComplexVector& x);

}  // namespace bdq
