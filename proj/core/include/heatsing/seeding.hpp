#pragma once

#include <cstdint>
#include <initializer_list>

namespace heatsing {

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a base seed and an index tuple,
/// e.g. derive_seed(base, {replica, component}).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

}  // namespace heatsing
