#pragma once

#include <stdexcept>

namespace pdstab {

// A gain region is provably empty for the given bounds (the uncertainty
// measure is at or above the stabilizability limit).
class RegionEmptyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An operation that needs a bounded gain region was called with m = 0,
// where the regions are open and unbounded.
class UnboundedRegionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A simulation or moment integration diverged past the overflow guard.
class BlowupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pdstab
