#pragma once

#include "ehctrl/sim_config.hpp"
#include "ehctrl/telemetry.hpp"

namespace ehctrl {

/// Runs the slot loop. Per slot, in this order:
///   1. draw channel states and harvests
///   2. every node computes y, s, z from its duals and stale remote copies
///   3. Bernoulli(z) transmission draws
///   4. collisions and decoding give gamma
///   5. plants step with gamma
///   6. batteries step (pay z under fluid accounting)
///   7. availability for the slot, then masked dual ascent
///   8. dual exchange over available pairs
///   9. telemetry
/// Steps 2 and 7 run across nodes in parallel when config.threads > 1; the
/// result is identical to sequential execution.
///
/// Throws ConfigError for an invalid config (or failed sizing rules in strict
/// mode) and InvariantViolation, stamped with slot and node, on causality,
/// non-finite state, mirror divergence, or a multiplier above its proven cap.
/// Records emitted before the failure have already reached `sink`.
Summary run(const SimConfig& config, TelemetrySink* sink = nullptr);

/// Largest |beta - step (capacity - charge)| tolerated before aborting.
inline constexpr double kMirrorTolerance = 1e-9;

}  // namespace ehctrl
