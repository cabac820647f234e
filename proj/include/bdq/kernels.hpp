#pragma once

#include "bdq/types.hpp"

namespace bdq::kernels {

// Hot inner loops of the measurement operator and penalty. Each kernel has a
// plain serial reference and an OpenMP variant; the default entry points
// dispatch on use_parallel(). The parallel reductions are chunked with a fixed
// chunk size and summed in index order, so results do not depend on the
// number of threads.

bool& use_parallel();

// y = A x  (A is L-by-N, column-major)
void cgemv(const ComplexMatrix& a, const ComplexVector& x, ComplexVector& y);
void cgemv_serial(const ComplexMatrix& a, const ComplexVector& x, ComplexVector& y);
void cgemv_parallel(const ComplexMatrix& a, const ComplexVector& x, ComplexVector& y);

// out = A^H w
void cgemv_adjoint(const ComplexMatrix& a, const ComplexVector& w, ComplexVector& out);
void cgemv_adjoint_serial(const ComplexMatrix& a, const ComplexVector& w, ComplexVector& out);
void cgemv_adjoint_parallel(const ComplexMatrix& a, const ComplexVector& w, ComplexVector& out);

// out = a .* conj(b)
void hadamard_conj(const ComplexVector& a, const ComplexVector& b, ComplexVector& out);
void hadamard_conj_serial(const ComplexVector& a, const ComplexVector& b, ComplexVector& out);
void hadamard_conj_parallel(const ComplexVector& a, const ComplexVector& b, ComplexVector& out);

// Coherence penalty sum: sum_i G0(scale * |u_i|^2) with G0(t) = max(t-1,0)^2.
double penalty_sum(const ComplexVector& u, double scale);
double penalty_sum_serial(const ComplexVector& u, double scale);
double penalty_sum_parallel(const ComplexVector& u, double scale);

// weights_i = G0'(scale * |u_i|^2) = 2 max(scale*|u_i|^2 - 1, 0); returns
// sum_i weights_i * |u_i|^2 (the m-side penalty factor needs it).
double penalty_weights(const ComplexVector& u, double scale, RealVector& weights);
double penalty_weights_serial(const ComplexVector& u, double scale, RealVector& weights);
double penalty_weights_parallel(const ComplexVector& u, double scale, RealVector& weights);

}  // namespace bdq::kernels
