#pragma once

#include <cstdint>

#include "gradcheck.hpp"

namespace daelstm::testing {

// Finite-difference checks on small random models (at most 8 units per
// layer). Each draws its model, data and corruption from `seed`.

/// Dense layer with every activation; parameters and the layer input.
GradCheckResult gradcheck_dense(std::uint64_t seed);
/// Three-layer LSTM stack with linear head, BPTT through 3 timesteps.
GradCheckResult gradcheck_lstm(std::uint64_t seed);
/// DAE stack under joint-dropped input and internal dropout; parameters and input.
GradCheckResult gradcheck_dae(std::uint64_t seed);
/// Combined fine-tune loss of a stacked model with all corruption active.
GradCheckResult gradcheck_finetune(std::uint64_t seed);

}  // namespace daelstm::testing
