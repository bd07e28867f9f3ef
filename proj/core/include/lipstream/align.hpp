#pragma once

#include <vector>

#include "lipstream/audio.hpp"
#include "lipstream/frame_ring.hpp"

namespace lipstream {

// Speech energy per millisecond: RMS over 10 ms hops, held for each
// millisecond of the hop. Length equals the buffer's whole milliseconds.
std::vector<double> energy_envelope_ms(const AudioBuffer& audio);

// Mouth motion per millisecond over [t0, t0 + span): each frame's value
// holds until the next frame; milliseconds before the first frame are 0.
std::vector<double> motion_envelope_ms(const std::vector<FrameRecord>& frames,
                                       Timestamp t0, DurationMs span);

struct AlignResult {
  DurationMs offset_ms = 0;  // positive: motion lags the audio
  double peak_corr = 0.0;
  bool low_confidence = false;
};

// Normalized cross-correlation over integer lags in [-max_lag, +max_lag],
// evaluated on the full-overlap region [max_lag, D - max_lag). Ties prefer
// the smaller |lag|, then the negative one. A flat input (sigma under
// 1e-12) cannot be aligned: offset 0, low_confidence set.
AlignResult align_envelopes(const std::vector<double>& energy,
                            const std::vector<double>& motion,
                            DurationMs max_lag = 50);

}  // namespace lipstream
