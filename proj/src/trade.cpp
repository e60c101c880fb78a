#include "consensus_lab/trade.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "consensus_lab/error.hpp"
#include "consensus_lab/markov_graph.hpp"

namespace consensus_lab {

namespace {

constexpr double kPivotTolerance = 1e-12;
constexpr double kTradeMargin = 1e-9;

}  // namespace

LinearProgramResult maximize_from_origin(const Matrix& a, const Vector& rhs, const Vector& c) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (rhs.size() != m || c.size() != n) throw PreconditionError("linear program: dimension mismatch");
    if ((rhs.array() < 0.0).any()) throw PreconditionError("linear program: the origin must be feasible");

    // Tableau rows 0..m-1 are constraints, row m is the reduced-cost row.
    // Columns 0..n-1 are structural, n..n+m-1 slack, last column the rhs.
    Matrix t = Matrix::Zero(m + 1, n + m + 1);
    t.topLeftCorner(m, n) = a;
    t.block(0, n, m, m).setIdentity();
    t.col(n + m).head(m) = rhs;
    t.row(m).head(n) = -c.transpose();
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

    for (;;) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j)
            if (t(m, j) < -kPivotTolerance) {
                enter = j;
                break;
            }
        if (enter < 0) break;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < m; ++r)
            if (t(r, enter) > kPivotTolerance) best = std::min(best, t(r, n + m) / t(r, enter));
        // Bland: among the minimizing rows, the one whose basic variable has the smallest index.
        Eigen::Index leave = -1;
        for (Eigen::Index r = 0; r < m; ++r) {
            if (t(r, enter) <= kPivotTolerance || t(r, n + m) / t(r, enter) > best + kPivotTolerance) continue;
            if (leave < 0 || basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)]) leave = r;
        }
        if (leave < 0) throw PreconditionError("linear program is unbounded");
        t.row(leave) /= t(leave, enter);
        for (Eigen::Index r = 0; r <= m; ++r)
            if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    LinearProgramResult out;
    out.solution = Vector::Zero(n);
    for (Eigen::Index r = 0; r < m; ++r)
        if (basis[static_cast<std::size_t>(r)] < n) out.solution(basis[static_cast<std::size_t>(r)]) = t(r, n + m);
    out.objective = c.dot(out.solution);
    return out;
}

NoTradeResult no_trade_test(const Matrix& b) {
    if (b.rows() != b.cols()) throw PreconditionError("no_trade_test: matrix must be square");
    const Eigen::Index n = b.rows();
    NoTradeResult out;
    out.reducible = !is_irreducible(b);

    // Shift x = u - 1 so that u lies in [0, 2]; since B 1 = 1 the constraint
    // (I - B) x <= 0 reads (I - B) u <= 0.
    const Matrix gain = b - Matrix::Identity(n, n);
    Matrix a(2 * n, n);
    a.topRows(n) = -gain;
    a.bottomRows(n).setIdentity();
    Vector rhs(2 * n);
    rhs.head(n).setZero();
    rhs.tail(n).setConstant(2.0);
    const Vector c = gain.transpose() * Vector::Ones(n);
    const auto lp = maximize_from_origin(a, rhs, c);

    const Vector x = lp.solution.array() - 1.0;
    const Vector surplus = gain * x;
    out.objective = surplus.sum();
    out.margin = surplus.maxCoeff();
    if (out.margin >= kTradeMargin && surplus.minCoeff() >= -kTradeMargin) {
        out.trade = true;
        out.witness = x;
    }
    return out;
}

}  // namespace consensus_lab
