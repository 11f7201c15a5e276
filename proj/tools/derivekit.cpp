#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "derivekit/session.hpp"

int main(int argc, char** argv) {
	CLI::App app{"derivekit: derive generalized constructors, induction schemes "
	             "and subterm relations for a small dependently-typed kernel"};
	app.require_subcommand(1);

	derivekit::session_config cfg;
	std::string emit = "pretty";
	bool no_check = false;

	CLI::App* run = app.add_subcommand("run", "execute the commands in a .ind file");
	run->add_option("file", cfg.input_path, "input .ind file")->required();
	run->add_option("--emit", emit, "output form: pretty, sexp or both")
	    ->check(CLI::IsMember({"pretty", "sexp", "both"}));
	run->add_flag("--no-check", no_check, "skip kernel checks on derived definitions");
	run->add_flag("--no-nested", cfg.no_nested,
	              "derive induction schemes without nested hypotheses");
	run->add_option("-o,--output", cfg.output_path, "write output to a file instead of stdout");

	CLI11_PARSE(app, argc, argv);

	cfg.check_enabled = !no_check;
	if (emit == "sexp")
		cfg.emit = derivekit::emit_mode::sexp;
	else if (emit == "both")
		cfg.emit = derivekit::emit_mode::both;

	return derivekit::run_session(cfg, std::cout, std::cerr);
}
