#pragma once

#include <optional>

#include "consensus_lab/model.hpp"

namespace consensus_lab {

struct NoTradeResult {
    /// Whether a payment profile x with Bx >= x, strict somewhere, exists.
    bool trade = false;
    /// Payment profile with ||x||_inf <= 1 when a trade exists.
    std::optional<Vector> witness;
    /// LP optimum of sum_s ((Bx)(s) - x(s)).
    double objective = 0.0;
    /// max_s ((Bx)(s) - x(s)) for the witness.
    double margin = 0.0;
    /// Whether B fails joint connectedness.
    bool reducible = false;
};

/// Maximizes sum_s ((Bx)(s) - x(s)) subject to Bx >= x and ||x||_inf <= 1
/// with a dense simplex (Bland's rule). A positive optimum means a trade.
NoTradeResult no_trade_test(const Matrix& b);

struct LinearProgramResult {
    Vector solution;
    double objective = 0.0;
};

/// max c^T u subject to A u <= rhs, u >= 0, with rhs >= 0 so the origin is feasible.
/// Throws PreconditionError when the problem is unbounded.
LinearProgramResult maximize_from_origin(const Matrix& a, const Vector& rhs, const Vector& c);

}  // namespace consensus_lab
