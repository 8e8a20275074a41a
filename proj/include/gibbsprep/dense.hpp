#pragma once

#include <Eigen/Dense>

#include "gibbsprep/hamiltonian.hpp"

namespace gibbsprep {

using DenseOp = Eigen::MatrixXcd;

// Dense ground truth lives behind a hard size cap; dimension 4096 keeps every
// check fast on a laptop.
inline constexpr int kDenseMaxSites = 12;

void require_dense_size(int n, const char* where);
void require_hermitian(const DenseOp& a, const char* where, double tol = 1e-12);

DenseOp pauli_to_dense(const PauliString& p);
DenseOp term_to_dense(const Hamiltonian& h, int a);
DenseOp hamiltonian_to_dense(const Hamiltonian& h);
// Sum of the given terms only.
DenseOp restricted_to_dense(const Hamiltonian& h, const TermSet& active);

// e^{scale * A} for Hermitian A, via eigendecomposition.
DenseOp hermitian_expm(const DenseOp& a, double scale);

// e^{-beta H} / tr(e^{-beta H}); unit trace and PSD up to 1e-12.
DenseOp gibbs_density(const Hamiltonian& h, double beta);

// (1/2) sum of singular values of a - b.
double trace_distance(const DenseOp& a, const DenseOp& b);

double operator_norm(const DenseOp& a);
double min_eigenvalue_hermitian(const DenseOp& a);

struct SandwichReport {
    bool precondition_ok = false;
    bool pass = false;
    double margin_lower = 0.0; // min eigenvalue of e^{-b(H-H_(S))} - (1-15/C) e^{-bH}
    double margin_upper = 0.0; // min eigenvalue of (1+15/C) e^{-bH} - e^{-b(H-H_(S))}
    double beta = 0.0;
    double c = 0.0;
};

// Checks (1 - 15/C) e^{-bH} <= e^{-b(H - H_(S))} <= (1 + 15/C) e^{-bH}
// with S = supp(H_{a_star}); wants beta < 1/(2C(Delta+1)), C > 5.
// Precondition violations are flagged in the report, not thrown.
SandwichReport check_spectral_sandwich(const Hamiltonian& h, int a_star, double beta, double c);

struct PeelingReport {
    bool precondition_ok = false;
    bool pass = false;
    double margin_lower = 0.0;
    double margin_upper = 0.0;
    double bound = 0.0; // 100 / C^t
};

// Checks both PSD inequalities of the truncated-propagator peeling bound for
// 0.5 I <= P <= 2 I, with T = T_{t, beta/2}(H, H_(S)), S = supp(H_{a_star}).
PeelingReport check_peeling(const Hamiltonian& h, int a_star, const DenseOp& p, int t,
                            double beta, double c);

} // namespace gibbsprep
