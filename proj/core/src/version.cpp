#include "heatsing/version.hpp"

#include <fftw3.h>

namespace heatsing {

std::string_view version() { return HEATSING_VERSION; }

std::string_view fft_backend_version() { return fftw_version; }

}  // namespace heatsing
