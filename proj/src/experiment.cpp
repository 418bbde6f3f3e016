#include "circlebreak/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace circlebreak {

namespace {

std::string trim(const std::string& s)
{
	auto b = s.find_first_not_of(" \t\r\n");
	if (b == std::string::npos)
		return "";
	auto e = s.find_last_not_of(" \t\r\n");
	return s.substr(b, e - b + 1);
}

long parse_long(const std::string& key, const std::string& value)
{
	try {
		std::size_t pos = 0;
		long v = std::stol(value, &pos);
		if (pos != value.size())
			throw validation_error("");
		return v;
	} catch (const std::exception&) {
		throw validation_error("config: bad integer for " + key + ": " + value);
	}
}

std::vector<long> parse_quotients(const std::string& value)
{
	std::vector<long> out;
	std::istringstream in(value);
	std::string item;
	while (std::getline(in, item, ','))
		out.push_back(parse_long("quotients", trim(item)));
	return out;
}

} // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw validation_error("config: cannot open " + path);
	ExperimentConfig cfg;
	std::string line;
	while (std::getline(in, line)) {
		line = trim(line);
		if (line.empty() || line[0] == '#')
			continue;
		auto eq = line.find('=');
		if (eq == std::string::npos)
			throw validation_error("config: expected key=value, got: " + line);
		cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
	}
	return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
	if (key == "preset")
		preset = value;
	else if (key == "quotients")
		quotients = parse_quotients(value);
	else if (key == "n_max")
		n_max = static_cast<int>(parse_long(key, value));
	else if (key == "base_bits")
		precision.base_bits = static_cast<unsigned>(parse_long(key, value));
	else if (key == "per_level_bits")
		precision.per_level_bits = static_cast<unsigned>(parse_long(key, value));
	else if (key == "grid")
		grid = static_cast<int>(parse_long(key, value));
	else if (key == "output_dir")
		output_dir = value;
	else
		throw validation_error("config: unknown key " + key);
}

void ExperimentConfig::validate() const
{
	if (n_max < 1 || n_max > 20)
		throw validation_error("config: n_max must be in [1, 20]");
	if (!quotients.empty() && n_max > static_cast<int>(quotients.size()))
		throw validation_error("config: n_max exceeds the quotient count");
	if (grid < 3)
		throw validation_error("config: grid must be at least 3");
	if (precision.base_bits < 53)
		throw validation_error("config: base_bits must be at least 53");
}

std::vector<long> ExperimentConfig::effective_quotients() const
{
	return quotients.empty() ? golden_quotients(n_max + 2) : quotients;
}

std::string ExperimentConfig::resolved_output_dir() const
{
	const char* env = std::getenv("CBREAK_OUTPUT_DIR");
	return env && *env ? std::string(env) : output_dir;
}

Real RateFit::rate() const
{
	if (below_noise_floor)
		throw validation_error("rate fit: window is below the noise floor");
	return model == RateModel::exponential ? exp(slope) : slope;
}

RateFit fit_rate(std::span<const Real> errors, int n_lo, RateModel model)
{
	if (errors.size() < 4)
		throw validation_error("rate fit: window needs at least 4 points");
	if (model == RateModel::polynomial && n_lo < 1)
		throw validation_error("rate fit: polynomial model needs n >= 1");
	RateFit fit;
	fit.model = model;
	fit.n_lo = n_lo;
	fit.n_hi = n_lo + static_cast<int>(errors.size()) - 1;
	for (const Real& e : errors)
		if (!(e > 0) || !is_finite(e)) {
			fit.below_noise_floor = true;
			return fit;
		}
	// least squares of y = log e against x = n (exponential) or log n
	std::size_t m = errors.size();
	std::vector<Real> xs(m), ys(m);
	for (std::size_t i = 0; i < m; ++i) {
		Real n(n_lo + static_cast<long>(i));
		xs[i] = model == RateModel::exponential ? n : log(n);
		ys[i] = log(errors[i]);
	}
	Real sx = 0, sy = 0;
	for (std::size_t i = 0; i < m; ++i) {
		sx += xs[i];
		sy += ys[i];
	}
	Real mx = sx / m, my = sy / m;
	Real sxx = 0, sxy = 0;
	for (std::size_t i = 0; i < m; ++i) {
		sxx += (xs[i] - mx) * (xs[i] - mx);
		sxy += (xs[i] - mx) * (ys[i] - my);
	}
	fit.slope = sxy / sxx;
	fit.intercept = my - fit.slope * mx;
	Real ss_res = 0, ss_tot = 0;
	for (std::size_t i = 0; i < m; ++i) {
		Real r = ys[i] - (fit.intercept + fit.slope * xs[i]);
		ss_res += r * r;
		ss_tot += (ys[i] - my) * (ys[i] - my);
	}
	fit.r_squared = ss_tot == 0 ? Real(1) : 1 - ss_res / ss_tot;
	if (fit.r_squared < 0)
		fit.r_squared = 0;
	if (fit.r_squared > 1)
		fit.r_squared = 1;
	return fit;
}

namespace {

BreakMap tuned_map(const ExperimentConfig& cfg)
{
	BreakMap base = BreakMap::from_preset(cfg.preset);
	auto family = [base](const Real& beta) { return base.with_beta(beta); };
	Real beta = tune_parameter(family, cfg.effective_quotients());
	return base.with_beta(beta);
}

} // namespace

ConvergenceRun run_convergence(const ExperimentConfig& cfg)
{
	cfg.validate();
	ContinuedFraction cf = ContinuedFraction::from_quotients(cfg.effective_quotients());
	PrecisionContext tune_ctx(cfg.precision.bits(cfg.n_max));
	ConvergenceRun run{tuned_map(cfg), {}};
	for (int n = 1; n <= cfg.n_max; ++n) {
		PrecisionContext ctx(cfg.precision.bits(n));
		DynamicalPartition part = DynamicalPartition::build(run.map, cf, n);
		LevelSummary lvl;
		lvl.bits = PrecisionContext::current_bits();
		lvl.coeffs = coefficients(part);
		lvl.d = d_norm(run.map, part);
		RenormPair pair = RenormPair::build(part);
		MoebiusApproximants ap = moebius_approximants(lvl.coeffs);
		lvl.c0 = distance(pair, ap.F, ap.G, 0, cfg.grid);
		lvl.c1 = distance(pair, ap.F, ap.G, 1, cfg.grid);
		lvl.c1_tilde = distance(pair, ap.F_tilde, ap.G_hat, 1, cfg.grid);
		lvl.has_c2 = pair.has_d2();
		if (lvl.has_c2)
			lvl.c2 = distance(pair, ap.F, ap.G, 2, cfg.grid);
		run.levels.push_back(std::move(lvl));
	}
	return run;
}

void write_convergence_csv(std::ostream& os, const ConvergenceRun& run)
{
	write_renorm_csv_header(os);
	for (const LevelSummary& lvl : run.levels) {
		const RenormCoeffs& k = lvl.coeffs;
		CoefficientResidual r = coefficient_residual(k);
		std::string c2f, c2g;
		if (lvl.has_c2) {
			c2f = lvl.c2.f_norm.str();
			c2g = lvl.c2.g_norm.str();
		}
		os << k.n << "," << k.qn << "," << k.a.str() << "," << k.b.str() << ","
		   << k.c.str() << "," << k.m.str() << "," << k.m_tilde.str() << ","
		   << k.m_hat.str() << "," << lvl.d.str() << "," << lvl.c0.f_norm.str()
		   << "," << lvl.c1.f_norm.str() << "," << c2f << ","
		   << lvl.c0.g_norm.str() << "," << lvl.c1.g_norm.str() << "," << c2g
		   << "," << r.r.str() << "," << r.r_over_a.str() << "\n";
	}
}

std::string convergence_plot_spec(const std::string& csv_name)
{
	std::ostringstream os;
	os << "data " << csv_name << "\n"
	   << "x n linear\n"
	   << "y C0_f C1_f C2_f C0_g C1_g C2_g d_n log\n"
	   << "y2 r_n_over_a_n log\n";
	return os.str();
}

std::string write_convergence_artifacts(const ConvergenceRun& run,
                                        const ExperimentConfig& cfg)
{
	namespace fs = std::filesystem;
	fs::path dir(cfg.resolved_output_dir());
	fs::create_directories(dir);
	fs::path csv = dir / "renorm.csv";
	{
		std::ofstream os(csv);
		if (!os)
			throw validation_error("cannot write " + csv.string());
		write_convergence_csv(os, run);
	}
	std::ofstream plot(dir / "renorm.plot");
	plot << convergence_plot_spec("renorm.csv");
	return csv.string();
}

std::vector<Real> read_csv_column(const std::string& path, const std::string& name)
{
	std::ifstream in(path);
	if (!in)
		throw validation_error("cannot open " + path);
	std::string line;
	if (!std::getline(in, line))
		throw validation_error(path + ": empty file");
	auto split = [](const std::string& s) {
		std::vector<std::string> cells;
		std::istringstream is(s);
		std::string cell;
		while (std::getline(is, cell, ','))
			cells.push_back(cell);
		if (!s.empty() && s.back() == ',')
			cells.push_back("");
		return cells;
	};
	std::vector<std::string> header = split(trim(line));
	std::size_t col = header.size();
	for (std::size_t i = 0; i < header.size(); ++i)
		if (header[i] == name)
			col = i;
	if (col == header.size())
		throw validation_error(path + ": no column named " + name);
	std::vector<Real> out;
	long row = 1;
	while (std::getline(in, line)) {
		++row;
		if (trim(line).empty())
			continue;
		std::vector<std::string> cells = split(trim(line));
		if (col >= cells.size())
			throw validation_error(path + ": row " + std::to_string(row) +
			                       " has too few cells");
		const std::string& cell = cells[col];
		if (cell.empty())
			throw validation_error(path + ": row " + std::to_string(row) +
			                       " column " + name + " is empty");
		try {
			out.emplace_back(cell);
		} catch (const std::exception&) {
			throw validation_error(path + ": row " + std::to_string(row) +
			                       " column " + name + " is not a number");
		}
	}
	return out;
}

namespace {

std::vector<Real> unit_grid(int points)
{
	std::vector<Real> g;
	g.reserve(points);
	for (int j = 0; j < points; ++j)
		g.push_back(Real(j) / (points - 1));
	return g;
}

void add_check(SuiteReport& rep, std::string id, const Real& value, const Real& cap)
{
	bool pass = value <= cap;
	rep.checks.push_back({std::move(id), value, cap, pass});
	rep.pass = rep.pass && pass;
}

} // namespace

SuiteReport run_lemma_suite(const ExperimentConfig& cfg, const Real& multiplier_scale)
{
	cfg.validate();
	SuiteReport rep;
	ContinuedFraction cf = ContinuedFraction::from_quotients(cfg.effective_quotients());
	PrecisionContext tune_ctx(cfg.precision.bits(cfg.n_max));
	BreakMap map = tuned_map(cfg);

	// distortion-lemma sweep on dyadic intervals; at the interior singular
	// point for the zygmund family, away from the break otherwise
	{
		PrecisionContext ctx(cfg.precision.base_bits);
		Real center = map.family() == Family::zygmund ? map.x_star() : Real(3) / 10;
		Real worst_cmp = 0, worst_cvx = 0, worst_itp = 0, worst_gap = 0, worst_2nd = 0;
		for (const LemmaRow& r : lemma_sweep(map, center, 6, 16)) {
			if (r.lemma_id == "distortion_comparison")
				worst_cmp = std::max(worst_cmp, r.ratio);
			else if (r.lemma_id == "convexity_defect")
				worst_cvx = std::max(worst_cvx, r.ratio);
			else if (r.lemma_id == "interpolation_defect")
				worst_itp = std::max(worst_itp, r.ratio);
			else if (r.lemma_id == "derivative_gap")
				worst_gap = std::max(worst_gap, r.ratio);
			else if (r.lemma_id == "second_derivative_gap")
				worst_2nd = std::max(worst_2nd, r.ratio);
		}
		add_check(rep, "distortion_comparison_ratio", worst_cmp, Real(100));
		add_check(rep, "convexity_defect_ratio", worst_cvx, Real(100));
		add_check(rep, "interpolation_defect_ratio", worst_itp, Real(100));
		if (map.has_d2()) {
			add_check(rep, "derivative_gap_ratio", worst_gap, Real(100));
			add_check(rep, "second_derivative_gap_ratio", worst_2nd, Real(100));
		}
	}

	// renormalization defect bounds: the distortion-ratio defect U of the
	// return maps, with the endpoint-difference multipliers, stays uniformly
	// small past the pre-asymptotic levels (pinned regression caps)
	if (cfg.n_max < 5)
		throw validation_error("lemma suite: needs n_max >= 5");
	Real tilde_v = 0, tilde_d1 = 0, hat_v = 0, hat_d1 = 0;
	for (int n = 4; n <= cfg.n_max; ++n) {
		PrecisionContext ctx(cfg.precision.bits(n));
		DynamicalPartition part = DynamicalPartition::build(map, cf, n);
		RenormCoeffs k = coefficients(part);
		std::vector<Real> grid = unit_grid(33);
		UpsilonEval tilde = upsilon(part, UpsilonVariant::tilde,
		                            k.m_tilde * multiplier_scale, grid);
		UpsilonEval hat = upsilon(part, UpsilonVariant::hat,
		                          k.m_hat * multiplier_scale, grid);
		tilde_v = std::max(tilde_v, tilde.max_abs_v);
		tilde_d1 = std::max(tilde_d1, tilde.max_abs_weighted_d1);
		hat_v = std::max(hat_v, hat.max_abs_v);
		hat_d1 = std::max(hat_d1, hat.max_abs_weighted_d1);
	}
	Real cap = Real(7) / 100;
	add_check(rep, "upsilon_tilde_max", tilde_v, cap);
	add_check(rep, "upsilon_tilde_weighted_d1_max", tilde_d1, cap);
	add_check(rep, "upsilon_hat_max", hat_v, cap);
	add_check(rep, "upsilon_hat_weighted_d1_max", hat_d1, cap);
	return rep;
}

void write_suite_csv(std::ostream& os, const SuiteReport& report)
{
	os << "check_id,value,cap,pass\n";
	for (const SuiteCheck& c : report.checks)
		os << c.id << "," << c.value.str() << "," << c.cap.str() << ","
		   << (c.pass ? "1" : "0") << "\n";
}

OracleResult run_oracle(const ExperimentConfig& cfg)
{
	cfg.validate();
	BreakMap base = BreakMap::from_preset(cfg.preset);
	if (base.family() != Family::moebius)
		throw validation_error("oracle: needs a fractional-linear preset");
	ContinuedFraction cf = ContinuedFraction::from_quotients(cfg.effective_quotients());
	PrecisionContext tune_ctx(cfg.precision.bits(cfg.n_max));
	BreakMap map = tuned_map(cfg);
	OracleResult out;
	long base_bits = cfg.precision.base_bits;
	for (int n = 1; n <= cfg.n_max; ++n) {
		PrecisionContext ctx(cfg.precision.bits(n));
		DynamicalPartition part = DynamicalPartition::build(map, cf, n);
		RenormPair pair = RenormPair::build(part);
		MoebiusApproximants ap = moebius_approximants(coefficients(part));
		NormReport c2 = distance(pair, ap.F, ap.G, 2, cfg.grid);
		// rounding allowance growing 16 bits per level, floored at 48
		// demanded bits: a precision-starved run (measured amplification is
		// about q_n ulps) must fail rather than be excused by the growth term
		Real allowed = std::min(pow2(-base_bits + 16 * n), pow2(-48));
		bool f_worst = c2.f_norm >= c2.g_norm;
		Real worst = f_worst ? c2.f_norm : c2.g_norm;
		if (!(worst <= allowed)) {
			out.pass = false;
			out.fail_level = n;
			out.worst = worst;
			out.allowed = allowed;
			out.argmax = f_worst ? c2.f_argmax : c2.g_argmax;
			std::ostringstream msg;
			msg << "oracle: C2 gap " << worst.str(8) << " at level " << n
			    << " (argmax z = " << out.argmax.str(12) << " on the "
			    << (f_worst ? "f" : "g")
			    << " side) exceeds the rounding allowance " << allowed.str(8)
			    << " for " << cfg.precision.bits(n)
			    << " working bits; raise base_bits";
			out.message = msg.str();
			return out;
		}
		out.worst = worst;
		out.allowed = allowed;
	}
	out.message = "oracle: all levels within the rounding allowance";
	return out;
}

ZygmundCheck run_zygmund_check(const ExperimentConfig& cfg, int k_min, int k_max)
{
	cfg.validate();
	if (k_min < 1 || k_max < k_min)
		throw validation_error("zygmund check: need 1 <= k_min <= k_max");
	PrecisionContext ctx(cfg.precision.base_bits);
	BreakMap map = BreakMap::from_preset(cfg.preset);
	Real gamma = effective_gamma(map);
	std::vector<Real> xis = standard_xi_grid(map);
	ZygmundCheck out;
	out.sup_ratio = 0;
	for (int k = k_min; k <= k_max; ++k) {
		Real tau = pow2(-k);
		std::vector<Real> one{tau};
		Real ratio = class_ratio(map, gamma, one, xis);
		out.rows.push_back({tau, ratio});
		out.sup_ratio = std::max(out.sup_ratio, ratio);
	}
	out.cap = Real(50);
	out.pass = out.sup_ratio <= out.cap;
	return out;
}

void write_zygmund_csv(std::ostream& os, const ZygmundCheck& check)
{
	os << "tau,ratio\n";
	for (const ZygmundCheckRow& r : check.rows)
		os << r.tau.str() << "," << r.ratio.str() << "\n";
}

} // namespace circlebreak
