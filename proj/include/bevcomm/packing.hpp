#pragma once

#include <optional>

#include "bevcomm/grid.hpp"
#include "bevcomm/wire.hpp"

namespace bevcomm {

// Budgeted sparse packing. A sender scores every cell, optionally smooths
// the score map, keeps the top cells its byte budget affords, and packs the
// masked feature vectors plus its own request map into one message.

struct PackingConfig {
    bool gaussian_enabled = true;
    int kernel_size = 3;  // odd
    double sigma = 1.0;
};

// Separable Gaussian blur with zero padding; the kernel is normalized to
// sum 1 so interior plateaus pass through unchanged, and the result is
// clamped back into [0, 1].
ScalarMap gaussian_filter(const ScalarMap& score, const PackingConfig& cfg);

// Mask of exactly min(budget_cells, number of positive-score cells) ones:
// highest score first, ties resolved toward the smaller row-major flat
// index. Cells scoring exactly zero are never selected no matter the
// budget. Budgets beyond the cell count behave like a full budget.
SelectionMask select_mask(const ScalarMap& score, int budget_cells, const PackingConfig& cfg);

// Per-cell packing score for round k: the sender's own confidence on the
// opening round, and confidence gated by the receiver's request map on
// every later round. receiver_request must be present exactly when
// round_k > 0.
ScalarMap pack_score(const ScalarMap& sender_confidence,
                     const std::optional<ScalarMap>& receiver_request, int round_k);

// Assembles the message: masked cells in increasing flat-index order with
// full channel vectors, alongside the sender's request map.
Message pack_message(const FeatureMap& f, const SelectionMask& mask,
                     const ScalarMap& sender_request, std::uint32_t sender,
                     std::uint32_t receiver, std::uint32_t round);

}  // namespace bevcomm
