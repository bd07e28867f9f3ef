#pragma once

#include <string>

#include "lipstream/audio.hpp"

namespace lipstream {

// RIFF/WAVE, PCM 16-bit mono only. Anything else is rejected with a
// diagnostic naming the offending chunk and byte offset; no resampling.
AudioBuffer read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioBuffer& audio);

}  // namespace lipstream
