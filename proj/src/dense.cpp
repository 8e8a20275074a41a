#include "gibbsprep/dense.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gibbsprep/monomial.hpp"

namespace gibbsprep {

void require_dense_size(int n, const char* where) {
    if (n > kDenseMaxSites)
        throw std::runtime_error(std::string(where) + ": dense path capped at " +
                                 std::to_string(kDenseMaxSites) + " sites, got " + std::to_string(n));
}

void require_hermitian(const DenseOp& a, const char* where, double tol) {
    if (operator_norm(a - a.adjoint()) > tol)
        throw std::logic_error(std::string(where) + ": matrix is not Hermitian");
}

DenseOp pauli_to_dense(const PauliString& p) {
    int n = p.sites();
    require_dense_size(n, "pauli_to_dense");
    const long dim = 1L << n;
    static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::complex<double> phase = powers[p.phase_exp()];

    // Site j is bit j of the computational-basis index:
    //   X^x Z^z |b> = (-1)^{z.b} |b xor x>
    uint64_t xmask = 0, zmask = 0;
    p.x_bits().for_each_set([&](int j) { xmask |= uint64_t{1} << j; });
    p.z_bits().for_each_set([&](int j) { zmask |= uint64_t{1} << j; });

    DenseOp out = DenseOp::Zero(dim, dim);
    for (long col = 0; col < dim; ++col) {
        long row = static_cast<long>(static_cast<uint64_t>(col) ^ xmask);
        double sgn = (__builtin_popcountll(static_cast<uint64_t>(col) & zmask) & 1) ? -1.0 : 1.0;
        out(row, col) = phase * sgn;
    }
    return out;
}

DenseOp term_to_dense(const Hamiltonian& h, int a) {
    return h.term(a).coeff * pauli_to_dense(h.term(a).pauli.string());
}

DenseOp hamiltonian_to_dense(const Hamiltonian& h) {
    require_dense_size(h.sites(), "hamiltonian_to_dense");
    const long dim = 1L << h.sites();
    DenseOp out = DenseOp::Zero(dim, dim);
    for (int a = 0; a < h.term_count(); ++a) out += term_to_dense(h, a);
    return out;
}

DenseOp restricted_to_dense(const Hamiltonian& h, const TermSet& active) {
    require_dense_size(h.sites(), "restricted_to_dense");
    const long dim = 1L << h.sites();
    DenseOp out = DenseOp::Zero(dim, dim);
    for (int a : active) out += term_to_dense(h, a);
    return out;
}

DenseOp hermitian_expm(const DenseOp& a, double scale) {
    require_hermitian(a, "hermitian_expm", 1e-10);
    Eigen::SelfAdjointEigenSolver<DenseOp> es(a);
    Eigen::VectorXd expvals = (scale * es.eigenvalues().array()).exp();
    return es.eigenvectors() * expvals.asDiagonal() * es.eigenvectors().adjoint();
}

DenseOp gibbs_density(const Hamiltonian& h, double beta) {
    require_dense_size(h.sites(), "gibbs_density");
    DenseOp hd = hamiltonian_to_dense(h);
    Eigen::SelfAdjointEigenSolver<DenseOp> es(hd);
    // Shift by the min eigenvalue before exponentiating; cancels in the ratio.
    Eigen::VectorXd shifted = -beta * (es.eigenvalues().array() - es.eigenvalues().minCoeff());
    Eigen::VectorXd w = shifted.array().exp();
    w /= w.sum();
    DenseOp rho = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    if (std::abs(rho.trace().real() - 1.0) > 1e-12)
        throw std::logic_error("gibbs_density: trace not 1");
    return rho;
}

double trace_distance(const DenseOp& a, const DenseOp& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::BDCSVD<DenseOp> svd(a - b);
    return 0.5 * svd.singularValues().sum();
}

double operator_norm(const DenseOp& a) {
    Eigen::BDCSVD<DenseOp> svd(a);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double min_eigenvalue_hermitian(const DenseOp& a) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

SandwichReport check_spectral_sandwich(const Hamiltonian& h, int a_star, double beta, double c) {
    SandwichReport rep;
    rep.beta = beta;
    rep.c = c;
    rep.precondition_ok =
        c > 5.0 && beta < 1.0 / (2.0 * c * (h.degree() + 1)) && h.sites() <= 10;
    require_dense_size(h.sites(), "check_spectral_sandwich");

    Bits s = h.term_support(a_star);
    DenseOp hd = hamiltonian_to_dense(h);
    DenseOp h_loc = restricted_to_dense(h, h.localized_terms(s));
    DenseOp full = hermitian_expm(hd, -beta);
    DenseOp dropped = hermitian_expm(hd - h_loc, -beta);

    double f = 15.0 / c;
    rep.margin_lower = min_eigenvalue_hermitian(dropped - (1.0 - f) * full);
    rep.margin_upper = min_eigenvalue_hermitian((1.0 + f) * full - dropped);
    rep.pass = rep.margin_lower >= -1e-10 && rep.margin_upper >= -1e-10;
    return rep;
}

PeelingReport check_peeling(const Hamiltonian& h, int a_star, const DenseOp& p, int t,
                            double beta, double c) {
    PeelingReport rep;
    rep.precondition_ok =
        c > 5.0 && beta < 1.0 / (2.0 * c * (h.degree() + 1)) && h.sites() <= 10 &&
        min_eigenvalue_hermitian(p - 0.5 * DenseOp::Identity(p.rows(), p.cols())) >= -1e-12 &&
        min_eigenvalue_hermitian(2.0 * DenseOp::Identity(p.rows(), p.cols()) - p) >= -1e-12;
    require_dense_size(h.sites(), "check_peeling");

    Bits s = h.term_support(a_star);
    TermSet q = h.localized_terms(s);
    DenseOp hd = hamiltonian_to_dense(h);
    DenseOp h_loc = restricted_to_dense(h, q);

    DenseOp series = truncated_series_dense(h, q, beta / 2.0, t);
    DenseOp half_dropped = hermitian_expm(hd - h_loc, -beta / 2.0);
    DenseOp middle = half_dropped * series.adjoint() * p * series * half_dropped;
    DenseOp half_full = hermitian_expm(hd, -beta / 2.0);
    DenseOp target = half_full * p * half_full;

    rep.bound = 100.0 / std::pow(c, t);
    rep.margin_lower = min_eigenvalue_hermitian(middle - (1.0 - rep.bound) * target);
    rep.margin_upper = min_eigenvalue_hermitian((1.0 + rep.bound) * target - middle);
    rep.pass = rep.margin_lower >= -1e-10 && rep.margin_upper >= -1e-10;
    return rep;
}

} // namespace gibbsprep
