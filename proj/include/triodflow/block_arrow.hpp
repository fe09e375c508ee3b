#ifndef TRIODFLOW_BLOCK_ARROW_HPP
#define TRIODFLOW_BLOCK_ARROW_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

#include "triodflow/errors.hpp"

namespace triodflow {

/// Symmetric positive-definite system made of per-chain block-tridiagonal
/// pieces coupled only through one optional shared head block (the junction
/// row/column). All blocks are d x d and the couplings are symmetric.
struct BlockArrowSystem {
    std::vector<std::vector<Eigen::MatrixXd>> diag; // diag[c][j], j = 0..n_c-1
    std::vector<std::vector<Eigen::MatrixXd>> off;  // off[c][j] couples nodes j, j+1
    Eigen::MatrixXd head;                           // 0x0 when absent
    std::vector<Eigen::MatrixXd> head_off;          // couples head with chain c node 0

    bool has_head() const { return head.size() > 0; }
};

struct BlockArrowVec {
    Eigen::VectorXd head;                // size 0 when absent
    std::vector<Eigen::MatrixXd> chains; // d x n_c
};

/// Schur elimination of each chain onto the head: block-Thomas sweeps per
/// chain, one dense d x d solve for the head, back-substitution. O(n d^3).
inline BlockArrowVec solve_block_arrow(const BlockArrowSystem& sys, const BlockArrowVec& rhs) {
    const std::size_t nc = sys.diag.size();
    BlockArrowVec sol;
    sol.chains.resize(nc);

    std::vector<std::vector<Eigen::LLT<Eigen::MatrixXd>>> fact(nc);
    std::vector<Eigen::MatrixXd> reduced_rhs(nc);

    for (std::size_t c = 0; c < nc; ++c) {
        const auto& D = sys.diag[c];
        const auto& U = sys.off[c];
        const int n = static_cast<int>(D.size());
        fact[c].resize(n);
        Eigen::MatrixXd rt = rhs.chains[c];

        // eliminate from the tail toward node 0
        std::vector<Eigen::MatrixXd> Dt(n);
        Dt[n - 1] = D[n - 1];
        fact[c][n - 1].compute(Dt[n - 1]);
        if (fact[c][n - 1].info() != Eigen::Success)
            throw Error("solve_block_arrow: chain block not positive-definite");
        for (int j = n - 2; j >= 0; --j) {
            Dt[j] = D[j] - U[j] * fact[c][j + 1].solve(U[j].transpose());
            rt.col(j) -= U[j] * fact[c][j + 1].solve(rt.col(j + 1));
            fact[c][j].compute(Dt[j]);
            if (fact[c][j].info() != Eigen::Success)
                throw Error("solve_block_arrow: chain block not positive-definite");
        }
        reduced_rhs[c] = std::move(rt);
    }

    Eigen::VectorXd head_sol;
    if (sys.has_head()) {
        Eigen::MatrixXd schur = sys.head;
        Eigen::VectorXd r = rhs.head;
        for (std::size_t c = 0; c < nc; ++c) {
            schur -= sys.head_off[c] * fact[c][0].solve(sys.head_off[c].transpose());
            r -= sys.head_off[c] * fact[c][0].solve(reduced_rhs[c].col(0));
        }
        head_sol = Eigen::LLT<Eigen::MatrixXd>(schur).solve(r);
        sol.head = head_sol;
    }

    for (std::size_t c = 0; c < nc; ++c) {
        const auto& U = sys.off[c];
        const int n = static_cast<int>(sys.diag[c].size());
        Eigen::MatrixXd u(reduced_rhs[c].rows(), n);
        Eigen::VectorXd r0 = reduced_rhs[c].col(0);
        if (sys.has_head()) r0 -= sys.head_off[c].transpose() * head_sol;
        u.col(0) = fact[c][0].solve(r0);
        for (int j = 1; j < n; ++j)
            u.col(j) = fact[c][j].solve(reduced_rhs[c].col(j) -
                                        U[j - 1].transpose() * u.col(j - 1));
        sol.chains[c] = std::move(u);
    }
    return sol;
}

} // namespace triodflow

#endif
