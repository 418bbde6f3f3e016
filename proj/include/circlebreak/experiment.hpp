#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "circlebreak/lemmalab.hpp"
#include "circlebreak/renorm.hpp"

namespace circlebreak {

// Experiment description: a map preset, a target rotation number (as partial
// quotients), how deep to sweep, and how much precision to spend per level.
// Loaded from a flat key=value file; individual keys can be overridden from
// the command line.  Keys: preset, quotients (comma-separated), n_max,
// base_bits, per_level_bits, grid, output_dir.
struct ExperimentConfig {
	std::string preset = "moebius:c=2";
	std::vector<long> quotients;       // empty = golden, length n_max + 2
	int n_max = 10;
	PrecisionPolicy precision;
	int grid = 257;
	std::string output_dir = ".";

	static ExperimentConfig from_file(const std::string& path);

	// Apply one "key=value" override; unknown key or bad value -> validation_error.
	void set(const std::string& key, const std::string& value);

	// n_max in [1, 20] and <= quotient count; positive grid and bits.
	void validate() const;

	// quotients, extended to golden when empty.
	std::vector<long> effective_quotients() const;

	// output_dir, unless the CBREAK_OUTPUT_DIR environment variable is set.
	std::string resolved_output_dir() const;
};

enum class RateModel { exponential, polynomial };

// Least-squares fit of log e_n against n (exponential model, rate() = exp(slope))
// or against log n (polynomial model, rate() = slope, the power-law exponent).
// below_noise_floor marks windows containing zero/negative/non-finite errors,
// where no fit is meaningful (the oracle-exact case); all other fields are
// unset then.
struct RateFit {
	RateModel model = RateModel::exponential;
	Real slope, intercept, r_squared;
	int n_lo = 0, n_hi = 0;
	bool below_noise_floor = false;

	Real rate() const;
};

// errors[i] is e_{n_lo + i}; the window must hold at least 4 points.
RateFit fit_rate(std::span<const Real> errors, int n_lo, RateModel model);

// One renormalization level of a convergence sweep, computed at the policy's
// per-level precision.
struct LevelSummary {
	RenormCoeffs coeffs;
	unsigned bits = 0;
	Real d;                // ||f^{q_n} - Id||_C0
	NormReport c0, c1;     // distance to (F, G)
	NormReport c1_tilde;   // distance to (F_tilde, G_hat)
	NormReport c2;         // order 2, only when f'' exists
	bool has_c2 = false;
};

struct ConvergenceRun {
	BreakMap map = BreakMap::rotation(Real(0));
	std::vector<LevelSummary> levels;
};

// Tunes the preset to the target quotients and sweeps levels 1..n_max.
ConvergenceRun run_convergence(const ExperimentConfig& cfg);

// Per-level CSV with the renormalization-table columns (see renorm.hpp).
void write_convergence_csv(std::ostream& os, const ConvergenceRun& run);

// Declarative plot description (data file, columns, log axes) for an external
// plotter; csv_name is the data file the spec refers to.
std::string convergence_plot_spec(const std::string& csv_name);

// Writes <dir>/renorm.csv and <dir>/renorm.plot, returns the CSV path.
std::string write_convergence_artifacts(const ConvergenceRun& run,
                                        const ExperimentConfig& cfg);

// Column `name` of a CSV file with a header row; missing file/column or an
// unparsable cell -> validation_error.
std::vector<Real> read_csv_column(const std::string& path, const std::string& name);

// One bound check of the lemma suite: value must stay below cap.
struct SuiteCheck {
	std::string id;
	Real value, cap;
	bool pass = false;
};

struct SuiteReport {
	std::vector<SuiteCheck> checks;
	bool pass = true;
};

// Distortion-lemma sweeps plus the renormalization defect bounds (max |U| and
// max |z0 (1-z0) U'| for both U variants per level).  The caps are pinned
// regression values for the shipped presets.  multiplier_scale multiplies the
// endpoint-difference multipliers before the defect checks; values other than
// 1 are the fault-injection knob and must trip the corresponding check.
SuiteReport run_lemma_suite(const ExperimentConfig& cfg,
                            const Real& multiplier_scale = Real(1));

// columns: check_id, value, cap, pass
void write_suite_csv(std::ostream& os, const SuiteReport& report);

// End-to-end correctness gate on the fractional-linear preset: at every level
// n <= n_max, the C2 distance of (f_n, g_n) to (F_n, G_n) must stay within a
// rounding allowance that grows 16 bits per level from the base precision but
// never exceeds 2^-48, so a precision-starved run is detected rather than
// excused by the growth term.
struct OracleResult {
	bool pass = true;
	int fail_level = -1;
	Real worst, allowed;
	Real argmax;
	std::string message;
};

OracleResult run_oracle(const ExperimentConfig& cfg);

// Empirical membership check of f' in the map's derivative class: sup of
// |second difference| / (tau Z_gamma(tau)) over dyadic tau = 2^-k.
struct ZygmundCheckRow {
	Real tau, ratio;
};

struct ZygmundCheck {
	std::vector<ZygmundCheckRow> rows;
	Real sup_ratio, cap;
	bool pass = false;
};

ZygmundCheck run_zygmund_check(const ExperimentConfig& cfg, int k_min = 4,
                               int k_max = 12);

// columns: tau, ratio
void write_zygmund_csv(std::ostream& os, const ZygmundCheck& check);

} // namespace circlebreak
