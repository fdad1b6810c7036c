#include "nsf/matexp.hpp"

#include <cmath>

namespace nsf {

MatC pade_expm(const MatC& A)
{
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const Eigen::Index n = A.rows();
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm1 > 5.4) s = static_cast<int>(std::ceil(std::log2(norm1 / 5.4)));
    const MatC As = A / std::pow(2.0, s);

    const MatC I = MatC::Identity(n, n);
    const MatC A2 = As * As;
    const MatC A4 = A2 * A2;
    const MatC A6 = A2 * A4;

    const MatC U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
                         b[3] * A2 + b[1] * I);
    const MatC V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 +
                   b[2] * A2 + b[0] * I;

    MatC E = (V - U).partialPivLu().solve(V + U);
    for (int i = 0; i < s; ++i) E = E * E;
    return E;
}

void matrix_phis(const MatC& A, MatC& E, MatC& phi1, MatC& phi2)
{
    const Eigen::Index n = A.rows();
    MatC B = MatC::Zero(3 * n, 3 * n);
    B.topLeftCorner(n, n) = A;
    B.block(0, n, n, n) = MatC::Identity(n, n);
    B.block(n, 2 * n, n, n) = MatC::Identity(n, n);
    const MatC EB = pade_expm(B);
    E = EB.topLeftCorner(n, n);
    phi1 = EB.block(0, n, n, n);
    phi2 = EB.block(0, 2 * n, n, n);
}

std::complex<double> phi1_scalar(std::complex<double> z)
{
    if (std::abs(z) < 1e-3) {
        // 6-term Taylor: sum z^k/(k+1)!
        std::complex<double> acc(0.0, 0.0);
        double fact = 1.0; // (k+1)!
        std::complex<double> zp(1.0, 0.0);
        for (int k = 0; k < 6; ++k) {
            fact *= (k + 1);
            acc += zp / fact;
            zp *= z;
        }
        return acc;
    }
    return (std::exp(z) - 1.0) / z;
}

std::complex<double> phi2_scalar(std::complex<double> z)
{
    if (std::abs(z) < 1e-3) {
        std::complex<double> acc(0.0, 0.0);
        double fact = 2.0; // (k+2)!
        std::complex<double> zp(1.0, 0.0);
        for (int k = 0; k < 6; ++k) {
            if (k > 0) fact *= (k + 2);
            acc += zp / fact;
            zp *= z;
        }
        return acc;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

} // namespace nsf
