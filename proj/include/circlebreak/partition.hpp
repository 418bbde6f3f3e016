#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "circlebreak/contfrac.hpp"
#include "circlebreak/maps.hpp"
#include "circlebreak/numerics.hpp"

namespace circlebreak {

struct PartitionReport {
	bool ok = true;
	std::size_t count = 0;
	Real coverage_residual; // | sum of interval lengths - 1 |
	Real max_gap;           // worst signed mismatch between adjacent intervals
	Real orbit_residual;    // max | F(y_j) - y_{j+1} |: endpoints really are an orbit
	long first_bad_index = -1;
	long first_bad_orbit = -1;
	std::string detail;
};

// Level-n dynamical partition of the circle by the orbit of the break point:
// q_{n-1} intervals with endpoints {xi_j, xi_{j+q_n}} and q_n intervals with
// endpoints {xi_{i+q_{n-1}}, xi_i}.  Endpoints are stored as lift values, so
// interval lengths are exact orbit displacements with no wrap ambiguity.
class DynamicalPartition {
public:
	static DynamicalPartition build(const BreakMap& map, const ContinuedFraction& cf,
	                                int n);

	int level() const { return n_; }
	const BreakMap& map() const { return map_; }
	const ContinuedFraction& cf() const { return cf_; }
	long long q(int m) const { return cf_.q(m); }
	long long p(int m) const { return cf_.p(m); }

	// Orbit of 0 under the lift, j = 0 .. q_n + q_{n-1} (one point beyond the
	// partition endpoints, used by the renormalization coefficients).
	std::size_t orbit_size() const { return orbit_.size(); }
	const Real& lift_point(std::size_t j) const { return orbit_[j]; }
	Real xi(std::size_t j) const { return wrap_unit(orbit_[j]); }

	// F^{q_m}(0) - p_m for m = n or n-1; sign alternates with parity.
	Real delta(int m) const;
	// F^{q_n + q_{n-1}}(0) - (p_n + p_{n-1}).
	Real delta_s() const;

	std::size_t interval_count() const;
	// |I^n_j| for j < q_{n-1} and |I^{n-1}_i| for i < q_n.
	Real length_new(std::size_t j) const;
	Real length_old(std::size_t i) const;
	// wrapped left endpoints (orientation resolved by parity)
	Real left_new(std::size_t j) const;
	Real left_old(std::size_t i) const;

	PartitionReport validate(const Real& tol) const;
	PartitionReport validate() const; // tol = 2^(-bits + 16 n)

	// copy with one orbit point displaced; used for fault-injection tests
	DynamicalPartition perturbed(std::size_t j, const Real& amount) const;

	// columns: j, xi_j, interval_family, interval_index, length
	void write_csv(std::ostream& os) const;

private:
	DynamicalPartition() = default;

	BreakMap map_ = BreakMap::rotation(Real(0));
	ContinuedFraction cf_;
	int n_ = 0;
	std::vector<Real> orbit_;
};

// ||f^{q_n} - Id||_C0: largest orbit displacement over the partition points
// plus pushed-forward interior samples (one per interval per sample).
Real d_norm(const BreakMap& map, const DynamicalPartition& part, int interior_samples = 64);

struct FinziReport {
	Real nu;
	Real denjoy_min, denjoy_max;     // extremes of log (f^{q_n})'
	Real rescaled_min, rescaled_max; // (f^i)'(x) (a0-b0)/(a_i-b_i)
	Real relcoord_min, relcoord_max; // z0(1-z0) / (z_i(1-z_i))
	bool ok = false;
};

// Denjoy bound |log (f^{q_n})'| <= nu at the orbit points, and both Finzi
// bounds along the orbit of the midpoint of the fundamental segment.
FinziReport finzi_check(const BreakMap& map, const DynamicalPartition& part);

} // namespace circlebreak
