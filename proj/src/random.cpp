#include "decolab/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace decolab {

namespace {

Matrix ginibre(std::size_t rows, std::size_t cols, Xoshiro256& rng) {
    Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.complex_normal();
    return g;
}

} // namespace

Matrix random_unitary(std::size_t n, Xoshiro256& rng) {
    const Matrix g = ginibre(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const double a = std::abs(r(j, j));
        if (a > 0.0) q.col(j) *= r(j, j) / a;
    }
    return q;
}

Ket random_ket(const HilbertSpace& space, Xoshiro256& rng) {
    return Ket::normalized(space, ginibre(space.total(), 1, rng).col(0));
}

DenseOperator random_density(const HilbertSpace& space, Xoshiro256& rng) {
    const Matrix w = ginibre(space.total(), space.total(), rng);
    Matrix rho = w * w.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return {space, rho};
}

DenseOperator random_hermitian(const HilbertSpace& space, Xoshiro256& rng) {
    const Matrix g = ginibre(space.total(), space.total(), rng);
    Matrix h = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (norm > 0.0) h /= norm;
    return {space, h};
}

} // namespace decolab
