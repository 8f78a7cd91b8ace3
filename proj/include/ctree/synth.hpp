#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctree/core.hpp"
#include "ctree/ingest.hpp"

namespace ctree {

/// Parameters for the synthetic grid-city generator.
struct SynthSpec {
    int days = 1;
    int sample_interval_s = 60;      // one trajectory point per interval
    double base_accuracy_m = 10.0;   // mean reported accuracy
    double accuracy_jitter_m = 5.0;  // uniform jitter added to accuracy
    double position_noise_m = 16.0;  // gaussian position noise
};

/// A ground-truth visit used to validate pipeline recovery.
struct SynthVisit {
    std::string element_id;
    TimeRange when;
};

struct SynthData {
    Trajectory trajectory;
    ElementStore elements;
    Taxonomy taxonomy;
    std::vector<SynthVisit> visits;
};

/// Deterministic synthetic dataset: a grid city of houses, offices,
/// shops, roads and a park, plus a scripted daily routine trajectory.
/// Identical seed and spec produce identical data.
SynthData synthesize(std::uint64_t seed, const SynthSpec& spec = {});

std::string serialize_visits(const std::vector<SynthVisit>& visits);

}  // namespace ctree
