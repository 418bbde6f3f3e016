#pragma once

#include <stdexcept>
#include <string>

namespace circlebreak {

// Base class for all library errors.
struct error : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (NaN, wrong sign, ...).
struct numeric_domain_error : error {
	using error::error;
};

// A precondition on user-supplied data failed (bad parameters, mistuned map, ...).
struct validation_error : error {
	using error::error;
};

// The working precision was exhausted before the requested accuracy was reached.
struct precision_error : error {
	explicit precision_error(const std::string& msg, long last_good = -1)
	    : error(msg), last_good_index(last_good)
	{}
	long last_good_index; // last index/level that is still trustworthy, -1 if none
};

// The operation needs a capability the map family does not provide (e.g. f'').
struct capability_error : error {
	using error::error;
};

// A derived object is degenerate (Moebius map with a pole inside its domain, ...).
struct degeneracy_error : error {
	using error::error;
};

} // namespace circlebreak
