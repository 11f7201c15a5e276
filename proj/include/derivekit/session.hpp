// Batch driver: execute vernacular commands in order against a session
// environment, pretty-print and/or dump derived definitions, and report
// check results. The session aborts on the first error.
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "derivekit/env.hpp"
#include "derivekit/genctor.hpp"
#include "derivekit/induction.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/pretty.hpp"
#include "derivekit/sexp.hpp"
#include "derivekit/subterm.hpp"
#include "derivekit/surface.hpp"

namespace derivekit {

enum class emit_mode { pretty, sexp, both };

struct session_config {
	std::string input_path;
	emit_mode emit = emit_mode::pretty;
	bool check_enabled = true;
	std::string output_path; // empty: stdout
	bool no_nested = false;
};

// exit codes
constexpr int exit_ok = 0;
constexpr int exit_parse_error = 1;
constexpr int exit_type_error = 2;
constexpr int exit_unsupported = 3;
constexpr int exit_io_error = 4;

// Renders one derivation result; forced auxiliary inductives come first so
// the pretty output re-parses against the pre-command environment.
inline std::string emit(const derived_def& def, const session_config& cfg, const global_env& env) {
	std::string pretty_block;
	std::string sexp_block;
	auto add_pretty = [&](const std::string& s) {
		if (!pretty_block.empty()) pretty_block += "\n\n";
		pretty_block += s;
	};
	auto add_sexp = [&](const std::string& s) {
		if (!sexp_block.empty()) sexp_block += "\n";
		sexp_block += s;
	};
	for (const auto& f : def.forced) {
		add_pretty(render_inductive(env, f, inductive_style::full_arity));
		add_sexp(sexp::write_inductive(f));
	}
	if (const auto* d = std::get_if<definition>(&def.payload)) {
		add_pretty(render_definition(env, def.dname, *d));
		add_sexp(sexp::write_definition(def.dname, *d));
	} else {
		const auto& ind = std::get<inductive_decl>(def.payload);
		add_pretty(render_inductive(env, ind, inductive_style::full_arity));
		add_sexp(sexp::write_inductive(ind));
	}
	switch (cfg.emit) {
	case emit_mode::pretty: return pretty_block + "\n";
	case emit_mode::sexp: return sexp_block + "\n";
	case emit_mode::both: return pretty_block + "\n----\n" + sexp_block + "\n";
	}
	return "";
}

struct session_result {
	int exit_code = exit_ok;
	std::string output;
	std::string diagnostics;
};

namespace detail {

inline void install_derived(global_env& env, const derived_def& def) {
	for (const auto& f : def.forced)
		if (!env.find_inductive(f.iname)) env.add_inductive(f);
	if (const auto* d = std::get_if<definition>(&def.payload))
		env.add_definition(def.dname, *d);
	else
		env.add_inductive(std::get<inductive_decl>(def.payload));
}

} // namespace detail

// Executes a whole program against a fresh prelude environment. The
// environment is returned through env_out when non-null (for tests).
inline session_result run_program_text(const std::string& text, const session_config& cfg,
                                       const std::string& display_name,
                                       global_env* env_out = nullptr) {
	session_result res;
	auto located = [&](source_pos pos, const std::string& msg) {
		return display_name + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " +
		       msg;
	};

	std::vector<command> cmds;
	try {
		cmds = parse_program(text);
	} catch (const parse_error& e) {
		res.exit_code = exit_parse_error;
		res.diagnostics = located(e.pos, e.message) + "\n";
		return res;
	}

	global_env env = prelude_env();
	for (const auto& cmd : cmds) {
		try {
			switch (cmd.k) {
			case command::kind::define_inductive: {
				inductive_decl d = resolve_inductive(env, cmd.ind);
				check_inductive(env, d);
				env.add_inductive(std::move(d));
				break;
			}
			case command::kind::define_constant: {
				term body = resolve(env, {}, cmd.body);
				term ty = cmd.ty ? resolve(env, {}, cmd.ty) : infer(env, {}, body);
				check(env, {}, body, ty);
				guard_check(env, body);
				env.add_definition(cmd.target, definition{ty, body});
				break;
			}
			case command::kind::derive_genctor: {
				derived_def d = derive_generalized_constructor(env, {cmd.target, cmd.as_name},
				                                               cfg.check_enabled);
				detail::install_derived(env, d);
				if (!res.output.empty()) res.output += "\n";
				res.output += emit(d, cfg, env);
				break;
			}
			case command::kind::scheme_induction: {
				derived_def d = derive_induction(env, {cmd.target, !cfg.no_nested, ""},
				                                 cfg.check_enabled);
				detail::install_derived(env, d);
				if (!res.output.empty()) res.output += "\n";
				res.output += emit(d, cfg, env);
				break;
			}
			case command::kind::derive_subterm: {
				derived_def d = derive_subterm(env, cmd.target, cfg.check_enabled);
				detail::install_derived(env, d);
				for (const auto& w : d.warnings)
					res.diagnostics += located(cmd.pos, "warning: " + w) + "\n";
				if (!res.output.empty()) res.output += "\n";
				res.output += emit(d, cfg, env);
				break;
			}
			}
		} catch (const unbound_identifier_error& e) {
			res.exit_code = exit_type_error;
			res.diagnostics += located(e.pos, "unbound identifier " + e.ident) + "\n";
			return res;
		} catch (const name_clash_error& e) {
			res.exit_code = exit_type_error;
			res.diagnostics += located(cmd.pos, e.what()) + "\n";
			return res;
		} catch (const type_error& e) {
			std::string msg = type_error_kind_name(e.kind);
			if (e.expected && e.got) {
				msg += ": expected " + pretty_print(env, e.ctx, *e.expected) + ", got " +
				       pretty_print(env, e.ctx, *e.got);
			} else if (!e.detail.empty()) {
				msg += ": " + e.detail;
			}
			res.exit_code = exit_type_error;
			res.diagnostics += located(cmd.pos, msg) + "\n";
			return res;
		} catch (const unsupported_error& e) {
			res.exit_code = exit_unsupported;
			res.diagnostics += located(cmd.pos, std::string("unsupported derivation: ") + e.what()) + "\n";
			return res;
		}
	}
	if (env_out) *env_out = std::move(env);
	return res;
}

// File-based entry point used by the CLI; returns the process exit code.
// Diagnostics go to err, derived output to the configured destination.
inline int run_session(const session_config& cfg, std::ostream& out, std::ostream& err) {
	std::ifstream in(cfg.input_path);
	if (!in) {
		err << cfg.input_path << ": cannot open input file\n";
		return exit_io_error;
	}
	std::stringstream buf;
	buf << in.rdbuf();

	session_result res = run_program_text(buf.str(), cfg, cfg.input_path);
	err << res.diagnostics;
	if (res.exit_code != exit_ok) return res.exit_code;

	if (cfg.output_path.empty()) {
		out << res.output;
		return exit_ok;
	}
	std::ofstream of(cfg.output_path, std::ios::binary);
	if (!of) {
		err << cfg.output_path << ": cannot open output file\n";
		return exit_io_error;
	}
	of << res.output;
	if (!of.good()) {
		err << cfg.output_path << ": write failed\n";
		return exit_io_error;
	}
	return exit_ok;
}

} // namespace derivekit
