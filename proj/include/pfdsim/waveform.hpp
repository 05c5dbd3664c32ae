#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pfdsim {

/// Non-owning sampled signal. `time` is strictly increasing and the two
/// spans have equal length.
struct WaveformView {
    std::span<const double> time;
    std::span<const double> value;

    [[nodiscard]] std::size_t size() const noexcept { return time.size(); }
    [[nodiscard]] bool empty() const noexcept { return time.empty(); }
};

/// Owning counterpart, mostly for synthetic signals in tests and tools.
struct Waveform {
    std::vector<double> time;
    std::vector<double> value;

    [[nodiscard]] WaveformView view() const noexcept { return {time, value}; }
    operator WaveformView() const noexcept { return view(); }
};

} // namespace pfdsim
