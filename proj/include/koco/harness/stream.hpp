#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "koco/harness/config.hpp"
#include "koco/losses.hpp"

namespace koco::harness {

/// Deterministic per (spec, seed); exactly spec.horizon events.
std::vector<LossEvent> generate_stream(const SyntheticSpec& spec, std::uint64_t seed);

/// Header row f1..fm then target (real) or label (+-1). Rows are kept in order.
/// Throws ParseError with the 1-based file line, TargetOutOfRange for squared
/// targets beyond C.
std::vector<LossEvent> ingest_csv(const std::string& path, LossFamily family, double clip_c);

/// Writes f1..fm,target (squared) or f1..fm,label with round-trip precision.
void emit_csv(const std::string& path, const std::vector<LossEvent>& events);

/// Events of the configured source, truncated to the horizon when one is set.
std::vector<LossEvent> load_stream(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace koco::harness
