// Shared test fixtures: an independent reference implementation of the
// de Bruijn operations, a small raw-term enumerator for property tests,
// and the corpus of inductive declarations used across suites.
#pragma once

#include <string>
#include <vector>

#include "derivekit/env.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/surface.hpp"
#include "derivekit/term.hpp"

namespace dk = derivekit;

namespace testsupport {

// Reference lift: structural recursion carrying the absolute number of
// binders crossed instead of a moving cutoff. Kept independent of
// derivekit::lift on purpose.
inline dk::term lift_ref(std::size_t n, std::size_t k, const dk::term& t, std::size_t depth = 0) {
	using namespace derivekit;
	if (const auto* r = t.as_rel())
		return r->index >= k + depth ? mk_rel(r->index + n) : t;
	if (const auto* p = t.as_prod())
		return mk_prod(p->na, lift_ref(n, k, p->dom, depth), lift_ref(n, k, p->cod, depth + 1));
	if (const auto* l = t.as_lam())
		return mk_lam(l->na, lift_ref(n, k, l->dom, depth), lift_ref(n, k, l->body, depth + 1));
	if (const auto* l = t.as_let())
		return mk_let(l->na, lift_ref(n, k, l->val, depth), lift_ref(n, k, l->ty, depth),
		              lift_ref(n, k, l->body, depth + 1));
	if (const auto* a = t.as_app())
		return mk_app(lift_ref(n, k, a->fn, depth), lift_ref(n, k, a->arg, depth));
	if (const auto* c = t.as_case()) {
		std::vector<dk::term> brs;
		for (const auto& b : c->branches) brs.push_back(lift_ref(n, k, b, depth));
		return mk_case(c->ind, lift_ref(n, k, c->motive, depth), lift_ref(n, k, c->scrutinee, depth), brs);
	}
	if (const auto* f = t.as_fix())
		return mk_fix(f->na, f->struct_arg, lift_ref(n, k, f->ty, depth), lift_ref(n, k, f->body, depth + 1));
	return t;
}

// Reference substitution, same style.
inline dk::term subst_ref(const dk::term& t, std::size_t k, const dk::term& u, std::size_t depth = 0) {
	using namespace derivekit;
	if (const auto* r = t.as_rel()) {
		if (r->index < k + depth) return t;
		if (r->index == k + depth) return lift_ref(k + depth, 0, u);
		return mk_rel(r->index - 1);
	}
	if (const auto* p = t.as_prod())
		return mk_prod(p->na, subst_ref(p->dom, k, u, depth), subst_ref(p->cod, k, u, depth + 1));
	if (const auto* l = t.as_lam())
		return mk_lam(l->na, subst_ref(l->dom, k, u, depth), subst_ref(l->body, k, u, depth + 1));
	if (const auto* l = t.as_let())
		return mk_let(l->na, subst_ref(l->val, k, u, depth), subst_ref(l->ty, k, u, depth),
		              subst_ref(l->body, k, u, depth + 1));
	if (const auto* a = t.as_app())
		return mk_app(subst_ref(a->fn, k, u, depth), subst_ref(a->arg, k, u, depth));
	if (const auto* c = t.as_case()) {
		std::vector<dk::term> brs;
		for (const auto& b : c->branches) brs.push_back(subst_ref(b, k, u, depth));
		return mk_case(c->ind, subst_ref(c->motive, k, u, depth), subst_ref(c->scrutinee, k, u, depth), brs);
	}
	if (const auto* f = t.as_fix())
		return mk_fix(f->na, f->struct_arg, subst_ref(f->ty, k, u, depth),
		              subst_ref(f->body, k, u, depth + 1));
	return t;
}

// All raw terms of node-count size <= max_size over a small alphabet.
// Not type-correct by construction; used for the surgery properties.
inline std::vector<dk::term> enumerate_raw_terms(std::size_t max_size) {
	using namespace derivekit;
	std::vector<std::vector<dk::term>> by_size(max_size + 1);
	if (max_size >= 1) {
		by_size[1] = {mk_rel(0), mk_rel(1), mk_rel(2), mk_prop(), mk_ind("nat")};
	}
	for (std::size_t s = 2; s <= max_size; ++s) {
		for (std::size_t ls = 1; ls + 1 < s + 1; ++ls) {
			std::size_t rs = s - 1 - ls;
			if (rs < 1 || rs > max_size) continue;
			for (const auto& a : by_size[ls])
				for (const auto& b : by_size[rs]) {
					by_size[s].push_back(mk_app(a, b));
					by_size[s].push_back(mk_prod(name::anon(), a, b));
					by_size[s].push_back(mk_lam(name::of("v"), a, b));
				}
		}
		// let nodes contribute the even sizes
		for (std::size_t as = 1; as + 2 < s; ++as)
			for (std::size_t bs = 1; as + bs + 1 < s; ++bs) {
				std::size_t cs = s - 1 - as - bs;
				if (cs < 1) continue;
				for (const auto& a : by_size[as])
					for (const auto& b : by_size[bs])
						for (const auto& c : by_size[cs])
							by_size[s].push_back(mk_let(name::of("w"), a, b, c));
			}
	}
	std::vector<dk::term> out;
	for (const auto& v : by_size)
		for (const auto& t : v) out.push_back(t);
	return out;
}

// The corpus from the acceptance criteria: bool, nat, option, sum, list,
// vec, brtree, rose. bool/nat/list/option already live in the prelude.
inline const char* corpus_source() {
	return R"(
Inductive sum (A B : Type) : Type :=
| inl (a : A) : sum A B
| inr (b : B) : sum A B.

Inductive vec (A : Type) : nat -> Type :=
| vnil : vec A 0
| vcons (n : nat) (a : A) (v : vec A n) : vec A (S n).

Inductive brtree (A : Type) : nat -> Type :=
| Leaf (a : A) : brtree A 0
| Node (n : nat) (l : list (brtree A n)) : brtree A (S n).

Inductive rose (A : Type) : Type :=
| R (l : list (rose A)) : rose A.
)";
}

// Prelude plus the corpus declarations, positivity-checked.
inline dk::global_env corpus_env() {
	dk::global_env env = dk::prelude_env();
	for (const auto& cmd : dk::parse_program(corpus_source())) {
		dk::inductive_decl d = dk::resolve_inductive(env, cmd.ind);
		dk::check_inductive(env, d);
		env.add_inductive(std::move(d));
	}
	return env;
}

// Names of all corpus inductives (prelude data types included).
inline std::vector<std::string> corpus_inductives() {
	return {"bool", "nat", "option", "sum", "list", "vec", "brtree", "rose"};
}

inline dk::term tparse(const dk::global_env& env, const std::string& src) {
	return dk::parse_term(src, {}, env);
}

// Declaration equality on closed forms: same name, alpha-equal full arity,
// same constructor names with alpha-equal closed types. The param/index
// split is allowed to differ.
inline bool decl_alpha_eq(const dk::inductive_decl& a, const dk::inductive_decl& b) {
	if (a.iname != b.iname || a.ctors.size() != b.ctors.size()) return false;
	if (!dk::alpha_eq(dk::arity_of(a), dk::arity_of(b))) return false;
	for (std::size_t i = 0; i < a.ctors.size(); ++i) {
		if (a.ctors[i].cname != b.ctors[i].cname) return false;
		if (!dk::alpha_eq(dk::closed_ctor_type(a, i), dk::closed_ctor_type(b, i))) return false;
	}
	return true;
}

} // namespace testsupport
