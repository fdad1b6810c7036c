// Dense matrix exponential for the small per-mode symbols: Pade-13 with
// scaling and squaring, plus the phi-functions used by the exponential
// integrator.  phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2; the scalar
// versions switch to a Taylor series for |z| < 1e-3 to avoid cancellation.
#pragma once

#include <Eigen/Dense>

#include <complex>

namespace nsf {

using MatC = Eigen::MatrixXcd;

// e^A by Pade-13 scaling and squaring.
MatC pade_expm(const MatC& A);

// e^A, phi1(A), phi2(A) in one shot via the block-augmentation identity
//   exp [[A I 0];[0 0 I];[0 0 0]] = [[e^A phi1(A) phi2(A)]; ...].
void matrix_phis(const MatC& A, MatC& E, MatC& phi1, MatC& phi2);

std::complex<double> phi1_scalar(std::complex<double> z);
std::complex<double> phi2_scalar(std::complex<double> z);

} // namespace nsf
