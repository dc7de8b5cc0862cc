#pragma once

#include <string_view>

namespace heatsing {

std::string_view version();
/// Version string of the FFT library the sampler was built against.
std::string_view fft_backend_version();

}  // namespace heatsing
