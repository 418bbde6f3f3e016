#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "circlebreak/experiment.hpp"

namespace fs = std::filesystem;
using namespace circlebreak;

namespace {

struct ConfigArgs {
	std::string config_file;
	std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args)
{
	cmd->add_option("--config", args.config_file, "key=value config file");
	cmd->add_option("--set", args.overrides,
	                "override a config key, e.g. --set preset=smooth:c=2,eps=0.1");
}

ExperimentConfig load_config(const ConfigArgs& args)
{
	ExperimentConfig cfg;
	if (!args.config_file.empty())
		cfg = ExperimentConfig::from_file(args.config_file);
	for (const std::string& kv : args.overrides) {
		auto eq = kv.find('=');
		if (eq == std::string::npos)
			throw validation_error("--set expects key=value, got: " + kv);
		cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
	}
	cfg.validate();
	return cfg;
}

fs::path output_file(const ExperimentConfig& cfg, const std::string& name)
{
	fs::path dir(cfg.resolved_output_dir());
	fs::create_directories(dir);
	return dir / name;
}

BreakMap tuned(const ExperimentConfig& cfg)
{
	BreakMap base = BreakMap::from_preset(cfg.preset);
	Real beta = tune_parameter([base](const Real& b) { return base.with_beta(b); },
	                           cfg.effective_quotients());
	return base.with_beta(beta);
}

int cmd_tune(const ExperimentConfig& cfg)
{
	PrecisionContext ctx(cfg.precision.bits(cfg.n_max));
	BreakMap map = tuned(cfg);
	std::cout << "preset=" << cfg.preset << "\n"
	          << "beta=" << map.beta().str() << "\n"
	          << "quotients=";
	auto qs = cfg.effective_quotients();
	for (std::size_t i = 0; i < qs.size(); ++i)
		std::cout << (i ? "," : "") << qs[i];
	std::cout << "\n";
	return 0;
}

int cmd_partition(const ExperimentConfig& cfg, int level)
{
	if (level < 1)
		level = cfg.n_max;
	PrecisionContext ctx(cfg.precision.bits(level));
	ContinuedFraction cf = ContinuedFraction::from_quotients(cfg.effective_quotients());
	DynamicalPartition part = DynamicalPartition::build(tuned(cfg), cf, level);
	PartitionReport rep = part.validate();
	if (!rep.ok)
		throw validation_error("partition check failed: " + rep.detail);
	fs::path out = output_file(cfg, "partition.csv");
	std::ofstream os(out);
	part.write_csv(os);
	std::cout << out.string() << "\n";
	return 0;
}

int cmd_renorm_table(const ExperimentConfig& cfg)
{
	ConvergenceRun run = run_convergence(cfg);
	std::cout << write_convergence_artifacts(run, cfg) << "\n";
	return 0;
}

int cmd_rate_fit(const std::string& csv, const std::string& column,
                 const std::string& model_name, int lo, int hi)
{
	RateModel model;
	if (model_name == "exp")
		model = RateModel::exponential;
	else if (model_name == "poly")
		model = RateModel::polynomial;
	else
		throw validation_error("rate-fit: model must be exp or poly");
	std::vector<Real> ns = read_csv_column(csv, "n");
	std::vector<Real> es = read_csv_column(csv, column);
	if (ns.size() != es.size())
		throw validation_error("rate-fit: ragged table");
	if (hi < 1)
		hi = static_cast<int>(ns.empty() ? 0 : static_cast<long>(ns.back()));
	std::vector<Real> window;
	for (std::size_t i = 0; i < ns.size(); ++i) {
		long n = static_cast<long>(ns[i]);
		if (n >= lo && n <= hi)
			window.push_back(es[i]);
	}
	RateFit fit = fit_rate(window, lo, model);
	std::cout << "column=" << column << "\nmodel=" << model_name << "\nwindow=["
	          << fit.n_lo << "," << fit.n_hi << "]\n";
	if (fit.below_noise_floor) {
		std::cout << "below_noise_floor=1\n";
		return 0;
	}
	std::cout << "slope=" << fit.slope.str() << "\nrate=" << fit.rate().str()
	          << "\nr_squared=" << fit.r_squared.str() << "\n";
	return 0;
}

int cmd_lemma_suite(const ExperimentConfig& cfg, double perturb)
{
	SuiteReport rep = run_lemma_suite(cfg, Real(perturb));
	fs::path out = output_file(cfg, "lemma_suite.csv");
	std::ofstream os(out);
	write_suite_csv(os, rep);
	std::cout << out.string() << "\n";
	for (const SuiteCheck& c : rep.checks)
		if (!c.pass)
			std::cout << "violated: " << c.id << " value=" << c.value.str(10)
			          << " cap=" << c.cap.str(10) << "\n";
	return rep.pass ? 0 : 1;
}

int cmd_zygmund_check(const ExperimentConfig& cfg)
{
	ZygmundCheck chk = run_zygmund_check(cfg);
	fs::path out = output_file(cfg, "zygmund_check.csv");
	std::ofstream os(out);
	write_zygmund_csv(os, chk);
	std::cout << out.string() << "\n"
	          << "sup_ratio=" << chk.sup_ratio.str(10) << " cap=" << chk.cap.str(10)
	          << "\n";
	return chk.pass ? 0 : 1;
}

int cmd_oracle(const ExperimentConfig& cfg)
{
	OracleResult res = run_oracle(cfg);
	std::cout << res.message << "\n";
	return res.pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"circle-diffeomorphism renormalization laboratory"};
	app.require_subcommand(1);

	ConfigArgs args;
	int level = 0;
	std::string csv, column, model = "exp";
	int lo = 4, hi = 0;
	double perturb = 1.0;

	add_config_options(app.add_subcommand("tune", "tune beta to the target quotients"),
	                   args);
	auto* part = app.add_subcommand("partition", "write the level-n partition CSV");
	add_config_options(part, args);
	part->add_option("--level", level, "partition level (default n_max)");
	add_config_options(
	    app.add_subcommand("renorm-table", "per-level renormalization table + plot"),
	    args);
	auto* rfit = app.add_subcommand("rate-fit", "least-squares rate fit on a CSV column");
	rfit->add_option("--csv", csv, "input CSV file")->required();
	rfit->add_option("--column", column, "error column name")->required();
	rfit->add_option("--model", model, "exp (log e vs n) or poly (log e vs log n)");
	rfit->add_option("--lo", lo, "window lower level (default 4)");
	rfit->add_option("--hi", hi, "window upper level (default last)");
	auto* suite = app.add_subcommand("lemma-suite", "distortion-lemma bound checks");
	add_config_options(suite, args);
	suite->add_option("--perturb-multipliers", perturb,
	                  "scale the defect multipliers (fault injection)");
	add_config_options(app.add_subcommand("zygmund-check", "derivative-class check"),
	                   args);
	add_config_options(
	    app.add_subcommand("oracle", "fractional-linear end-to-end correctness gate"),
	    args);

	CLI11_PARSE(app, argc, argv);

	try {
		CLI::App* sub = app.get_subcommands().front();
		const std::string& name = sub->get_name();
		if (name == "rate-fit")
			return cmd_rate_fit(csv, column, model, lo, hi);
		ExperimentConfig cfg = load_config(args);
		if (name == "tune")
			return cmd_tune(cfg);
		if (name == "partition")
			return cmd_partition(cfg, level);
		if (name == "renorm-table")
			return cmd_renorm_table(cfg);
		if (name == "lemma-suite")
			return cmd_lemma_suite(cfg, perturb);
		if (name == "zygmund-check")
			return cmd_zygmund_check(cfg);
		if (name == "oracle")
			return cmd_oracle(cfg);
		throw validation_error("unknown command " + name);
	} catch (const precision_error& e) {
		std::cerr << "precision error: " << e.what() << "\n";
		return 2;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
}
