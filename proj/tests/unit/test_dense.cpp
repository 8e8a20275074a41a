#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "gibbsprep/models.hpp"
#include "gibbsprep/monomial.hpp"
#include "helpers.hpp"

using namespace gibbsprep;
using gibbsprep::testing::max_abs_diff;

namespace {

// second route for the trace norm: eigenvalue absolute sum of the Hermitian difference
double trace_distance_eig(const DenseOp& a, const DenseOp& b) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace

TEST_CASE("gibbs density of a zero-term Hamiltonian is maximally mixed") {
    Hamiltonian h(3, 1, {});
    CHECK(max_abs_diff(gibbs_density(h, 0.7), DenseOp::Identity(8, 8) / 8.0) <= 1e-12);
}

TEST_CASE("gibbs density of a single sigma_z term matches the closed form") {
    std::vector<Term> terms(1);
    terms[0].coeff = 1.0;
    terms[0].pauli = SignedPauli(PauliString::single(1, 0, Axis::Z));
    Hamiltonian h(1, 1, std::move(terms));
    double beta = 0.3;
    DenseOp rho = gibbs_density(h, beta);
    double z = 2.0 * std::cosh(beta);
    CHECK(std::abs(rho(0, 0).real() - std::exp(-beta) / z) <= 1e-12);
    CHECK(std::abs(rho(1, 1).real() - std::exp(beta) / z) <= 1e-12);
    CHECK(std::abs(rho(0, 1)) <= 1e-14);
}

TEST_CASE("commuting ZZ chain matches the product of per-edge exponentials") {
    Hamiltonian h = grid_zz(1, 4); // a 4-site chain of ZZ terms
    double beta = 0.2;
    DenseOp prod = DenseOp::Identity(16, 16);
    for (int a = 0; a < h.term_count(); ++a)
        prod = prod * hermitian_expm(term_to_dense(h, a), -beta);
    DenseOp rho = gibbs_density(h, beta);
    CHECK(max_abs_diff(rho, prod / prod.trace().real()) <= 1e-12);
}

TEST_CASE("gibbs density is PSD, unit trace, and commutes with H") {
    Hamiltonian h = chain_tfim(4, 0.8, 0.6);
    DenseOp rho = gibbs_density(h, 0.05);
    CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-12);
    CHECK(min_eigenvalue_hermitian(rho) >= -1e-12);
    DenseOp hd = hamiltonian_to_dense(h);
    CHECK(max_abs_diff(hd * rho, rho * hd) <= 1e-10);
}

TEST_CASE("trace distance basics") {
    Hamiltonian h = chain_tfim(3);
    DenseOp rho = gibbs_density(h, 0.02);
    CHECK(trace_distance(rho, rho) <= 1e-14);

    DenseOp a = DenseOp::Zero(2, 2), b = DenseOp::Zero(2, 2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(trace_distance(a, DenseOp::Zero(4, 4)), std::invalid_argument);
}

TEST_CASE("trace distance agrees with the eigenvalue route on Hermitian pairs") {
    for (int rep = 0; rep < 10; ++rep) {
        Hamiltonian h = random_klocal(4, 6, 2, -1.0, 1.0, 100 + rep);
        DenseOp a = gibbs_density(h, 0.02);
        DenseOp b = gibbs_density(h, 0.04);
        CHECK(std::abs(trace_distance(a, b) - trace_distance_eig(a, b)) <= 1e-10);
    }
}

TEST_CASE("dense size cap") {
    CHECK_THROWS_AS(require_dense_size(13, "test"), std::runtime_error);
}

TEST_CASE("spectral sandwich: single term reduces to sandwiching the identity") {
    std::vector<Term> terms(1);
    terms[0].coeff = 0.9;
    terms[0].pauli = SignedPauli(PauliString::from_axes(2, {{0, Axis::Z}, {1, Axis::Z}}));
    Hamiltonian h(2, 2, std::move(terms));
    double c = 10.0;
    SandwichReport rep = check_spectral_sandwich(h, 0, 0.9 / (2 * c * (h.degree() + 1)), c);
    CHECK(rep.precondition_ok);
    CHECK(rep.pass);
}

TEST_CASE("spectral sandwich passes at the bound and reports violations at 10x") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Hamiltonian h = random_klocal_bounded_degree(5, 7, 2, 3, 200 + seed);
        double c = 10.0;
        double beta = 0.99 / (2.0 * c * (h.degree() + 1));
        SandwichReport rep = check_spectral_sandwich(h, 0, beta, c);
        CHECK(rep.precondition_ok);
        CHECK(rep.pass);
    }
    // deliberately too cold: the report flags the precondition at 10x beta
    for (uint64_t seed = 0; seed < 8; ++seed) {
        Hamiltonian h = random_klocal_bounded_degree(5, 7, 2, 3, 300 + seed);
        double c = 10.0;
        SandwichReport rep = check_spectral_sandwich(h, 0, 10.0 / (2.0 * c * (h.degree() + 1)), c);
        CHECK(!rep.precondition_ok);
    }

    // pushed far enough, the PSD margins themselves go negative
    bool margin_violation = false;
    for (uint64_t seed = 0; seed < 40 && !margin_violation; ++seed) {
        Hamiltonian base = random_klocal(5, 8, 2, -1.0, 1.0, seed);
        std::vector<Term> terms;
        for (int a = 0; a < base.term_count(); ++a) {
            Term t = base.term(a);
            t.coeff = t.coeff >= 0 ? 1.0 : -1.0;
            terms.push_back(t);
        }
        Hamiltonian h(5, 2, std::move(terms));
        double c = 10.0;
        double beta = 30.0 * 0.99 / (2.0 * c * (h.degree() + 1));
        for (int a = 0; a < std::min(4, h.term_count()); ++a) {
            SandwichReport rep = check_spectral_sandwich(h, a, beta, c);
            if (!rep.pass) margin_violation = true;
        }
    }
    CHECK(margin_violation);
}

TEST_CASE("peeling check: P = I at large t approaches the sandwich") {
    Hamiltonian h = random_klocal_bounded_degree(4, 5, 2, 3, 400);
    double c = 10.0;
    double beta = 0.9 / (2.0 * c * (h.degree() + 1));
    PeelingReport rep = check_peeling(h, 0, DenseOp::Identity(16, 16), 8, beta, c);
    CHECK(rep.precondition_ok);
    CHECK(rep.pass);
}

TEST_CASE("peeling check: random P with spectrum in [0.5, 2] passes at t = 1") {
    Rng rng(43);
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Hamiltonian h = random_klocal_bounded_degree(4, 5, 2, 3, 500 + seed);
        const long dim = 1L << h.sites();
        DenseOp g = DenseOp::Random(dim, dim);
        Eigen::SelfAdjointEigenSolver<DenseOp> es(g + g.adjoint());
        Eigen::VectorXd vals(dim);
        for (long i = 0; i < dim; ++i) vals(i) = 0.5 + 1.5 * rng.uniform_double();
        DenseOp p = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();

        double c = 10.0;
        double beta = 0.9 / (2.0 * c * (h.degree() + 1));
        PeelingReport rep = check_peeling(h, 0, p, 1, beta, c);
        CHECK(rep.precondition_ok);
        CHECK(rep.pass);
    }
}

TEST_CASE("peeling check: t = 0 bound is vacuous") {
    Hamiltonian h = random_klocal_bounded_degree(3, 4, 2, 3, 600);
    double c = 10.0;
    double beta = 0.9 / (2.0 * c * (h.degree() + 1));
    PeelingReport rep = check_peeling(h, 0, DenseOp::Identity(8, 8), 0, beta, c);
    CHECK(rep.bound == doctest::Approx(100.0));
    CHECK(rep.pass);
}
