// Named, minimally parenthesized rendering of kernel terms and declarations.
// De Bruijn variables are resolved against the context with deterministic
// freshening (primes appended on clashes). Output is stable across runs and
// re-parses to an alpha-equal term.
#pragma once

#include <string>
#include <vector>

#include "derivekit/env.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/term.hpp"

namespace derivekit {

namespace detail {

// precedence levels; a subterm is parenthesized when its level is below
// the level its position requires
constexpr int prec_term = 0;  // binders, let, fix
constexpr int prec_arrow = 1; // right-assoc ->
constexpr int prec_eq = 2;    // infix =, non-associative
constexpr int prec_cons = 3;  // infix ::, right-assoc
constexpr int prec_app = 4;   // application, left-assoc
constexpr int prec_atom = 5;

struct printer {
	const global_env& env;
	std::vector<std::string> scope; // display names, innermost last; "" for unusable slots

	bool taken(const std::string& n) const {
		if (env.contains(n)) return true;
		for (const auto& s : scope)
			if (s == n) return true;
		return false;
	}

	std::string fresh(const name& na, const char* base = "x") const {
		std::string n = na.is_anon() ? base : na.id();
		while (taken(n)) n += "'";
		return n;
	}

	static std::string paren_if(bool b, std::string s) { return b ? "(" + std::move(s) + ")" : std::move(s); }

	std::string render(const term& t, int prec) {
		if (auto n = as_nat(t)) return std::to_string(*n);

		if (const auto* s = t.as_sort()) {
			if (s->s.is_prop()) return "Prop";
			if (s->s.level() == 0) return "Type";
			return "Type@{" + std::to_string(s->s.level()) + "}";
		}
		if (const auto* r = t.as_rel()) {
			if (r->index >= scope.size() || scope[scope.size() - 1 - r->index].empty())
				throw type_error(type_error_kind::unbound_rel, {}, t, "variable escapes the printing context");
			return scope[scope.size() - 1 - r->index];
		}
		if (t.as_ind()) return t.as_ind()->ind;
		if (const auto* c = t.as_construct()) {
			const inductive_decl* d = env.find_inductive(c->ind);
			if (!d || c->idx >= d->ctors.size())
				throw type_error(type_error_kind::unknown_global, {}, t, "unknown constructor");
			return d->ctors[c->idx].cname;
		}
		if (t.as_const()) return t.as_const()->cname;

		if (t.as_prod()) {
			const auto* p = t.as_prod();
			if (!occurs_rel(p->cod, 0)) {
				std::string dom = render(p->dom, prec_eq);
				scope.push_back("");
				std::string cod = render(p->cod, prec_arrow);
				scope.pop_back();
				return paren_if(prec > prec_arrow, dom + " -> " + cod);
			}
			std::string out = "forall";
			term cur = t;
			std::size_t pushed = 0;
			while (const auto* pr = cur.as_prod()) {
				if (!occurs_rel(pr->cod, 0)) break;
				std::string n = fresh(pr->na);
				out += " (" + n + " : " + render(pr->dom, prec_term) + ")";
				scope.push_back(n);
				++pushed;
				cur = pr->cod;
			}
			out += ", " + render(cur, prec_term);
			scope.resize(scope.size() - pushed);
			return paren_if(prec > prec_term, out);
		}
		if (t.as_lam()) {
			std::string out = "fun";
			term cur = t;
			std::size_t pushed = 0;
			while (const auto* l = cur.as_lam()) {
				bool used = occurs_rel(l->body, 0);
				std::string n = l->na.is_anon() && !used ? "_" : fresh(l->na);
				out += " (" + n + " : " + render(l->dom, prec_term) + ")";
				scope.push_back(n == "_" ? "" : n);
				++pushed;
				cur = l->body;
			}
			out += " => " + render(cur, prec_term);
			scope.resize(scope.size() - pushed);
			return paren_if(prec > prec_term, out);
		}
		if (const auto* l = t.as_let()) {
			std::string n = fresh(l->na);
			std::string out = "let " + n + " : " + render(l->ty, prec_term) + " := " + render(l->val, prec_term);
			scope.push_back(n);
			out += " in " + render(l->body, prec_term);
			scope.pop_back();
			return paren_if(prec > prec_term, out);
		}
		if (const auto* f = t.as_fix()) {
			std::string n = fresh(f->na, "F");
			std::string out = "fix " + n + " {struct " + std::to_string(f->struct_arg) + "} : " +
			                  render(f->ty, prec_term) + " := ";
			scope.push_back(n);
			out += render(f->body, prec_term);
			scope.pop_back();
			return paren_if(prec > prec_term, out);
		}
		if (const auto* c = t.as_case()) {
			const inductive_decl* d = env.find_inductive(c->ind);
			if (!d || d->ctors.size() != c->branches.size())
				throw type_error(type_error_kind::ill_formed_case, {}, t, "cannot render match");
			std::string out = "match " + render(c->scrutinee, prec_arrow) + " in " + c->ind +
			                  " return " + render(c->motive, prec_term) + " with";
			for (std::size_t j = 0; j < c->branches.size(); ++j)
				out += " | " + d->ctors[j].cname + " => " + render(c->branches[j], prec_term);
			out += " end";
			return out;
		}

		// application
		auto [h, args] = decompose_app(t);
		if (const auto* hc = h.as_construct(); hc && hc->ind == "list" && hc->idx == 1 && args.size() == 3) {
			std::string out = render(args[1], prec_cons + 1) + " :: " + render(args[2], prec_cons);
			return paren_if(prec > prec_cons, out);
		}
		if (const auto* hi = h.as_ind(); hi && hi->ind == "eq" && args.size() == 3) {
			std::string out = render(args[1], prec_eq + 1) + " = " + render(args[2], prec_eq + 1);
			return paren_if(prec > prec_eq, out);
		}
		std::string out = render(h, prec_app);
		for (const auto& a : args) out += " " + render(a, prec_atom);
		return paren_if(prec > prec_app, out);
	}
};

inline std::vector<std::string> seed_scope(const global_env& env, const context& ctx) {
	printer p{env, {}};
	for (const auto& d : ctx) p.scope.push_back(p.fresh(d.na));
	return p.scope;
}

} // namespace detail

inline std::string pretty_print(const global_env& env, const context& ctx, const term& t) {
	detail::printer p{env, detail::seed_scope(env, ctx)};
	return p.render(t, detail::prec_term);
}

inline std::string render_definition(const global_env& env, const std::string& dname,
                                     const definition& def) {
	return "Definition " + dname + " : " + pretty_print(env, {}, def.ty) + " := " +
	       pretty_print(env, {}, def.body) + ".";
}

enum class inductive_style {
	with_params, // Inductive nm (A : Type) : arity := c : ty-in-param-scope | ...
	full_arity,  // Inductive nm : forall params, arity := c : closed-ty | ...
};

inline std::string render_inductive(const global_env& env, const inductive_decl& d,
                                    inductive_style style) {
	detail::printer p{env, {}};
	std::string out = "Inductive " + d.iname;
	if (style == inductive_style::with_params) {
		for (const auto& par : d.params) {
			std::string n = p.fresh(par.na);
			out += " (" + n + " : " + p.render(par.ty, detail::prec_term) + ")";
			p.scope.push_back(n);
		}
	}
	term arity = compose_prod(d.indices, mk_sort(d.s));
	if (style == inductive_style::full_arity) arity = compose_prod(d.params, std::move(arity));
	out += " : " + p.render(arity, detail::prec_term) + " :=";
	for (std::size_t j = 0; j < d.ctors.size(); ++j) {
		term ty = style == inductive_style::full_arity ? closed_ctor_type(d, j) : d.ctors[j].ty;
		out += "\n| " + d.ctors[j].cname + " : " + p.render(ty, detail::prec_term);
	}
	out += ".";
	return out;
}

// Renders entries beyond the prelude as re-parseable vernacular.
inline std::string render_env(const global_env& env, std::size_t skip_entries) {
	std::string out;
	const auto& es = env.entries();
	for (std::size_t i = skip_entries; i < es.size(); ++i) {
		if (!out.empty()) out += "\n\n";
		if (const auto* d = std::get_if<inductive_decl>(&es[i].payload))
			out += render_inductive(env, *d, inductive_style::with_params);
		else
			out += render_definition(env, es[i].ename, std::get<definition>(es[i].payload));
	}
	return out;
}

} // namespace derivekit
