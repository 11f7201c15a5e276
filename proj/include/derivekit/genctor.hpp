// Generalized constructors: from a constructor of a non-mutual inductive,
// derive the variant whose result indices are abstracted into fresh
// variables constrained by propositional equations, plus the transport
// body proving it.
#pragma once

#include <string>
#include <vector>

#include "derivekit/deriving.hpp"
#include "derivekit/env.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/term.hpp"

namespace derivekit {

struct genctor_request {
	std::string ctor;
	std::string new_name;
};

// Splits a fully applied constructor head at the inductive's parameter
// count: brtree A (S n) -> (brtree A, [S n]).
inline std::pair<term, std::vector<term>> split_index_spine(const global_env& env, const term& head,
                                                            const inductive_decl& ind) {
	(void)env;
	auto [h, args] = decompose_app(head);
	const auto* hi = h.as_ind();
	if (!hi || hi->ind != ind.iname || args.size() < ind.params.size())
		throw type_error(type_error_kind::ill_formed_case, {}, head,
		                 "malformed constructor head for " + ind.iname);
	std::vector<term> ps(args.begin(), args.begin() + static_cast<long>(ind.params.size()));
	std::vector<term> ixs(args.begin() + static_cast<long>(ind.params.size()), args.end());
	return {mk_apps(h, ps), std::move(ixs)};
}

// The index-abstraction recursion. Products pass through; each application
// argument in the index spine is replaced by a fresh variable "x" plus an
// equation x = <argument>; the head is finally applied to the abstracted
// variables. The argument is lifted by 2n (and by 2n+1 inside its equation)
// to account for the n (x, eqn) binder pairs inserted so far. With
// full_spine the recursion also abstracts parameter applications instead of
// stopping at the parameter-applied head.
inline term abstract_eqns(const global_env& env, const context& ctx, const term& ty, std::size_t n,
                          bool full_spine = false) {
	if (const auto* p = ty.as_prod()) {
		context ctx2 = ctx_push(ctx, local_decl{p->na, p->dom, std::nullopt});
		return mk_prod(p->na, p->dom, abstract_eqns(env, ctx2, p->cod, 0, full_spine));
	}
	bool peel = false;
	if (ty.as_app()) {
		peel = true;
		if (!full_spine) {
			auto [h, args] = decompose_app(ty);
			if (const auto* hi = h.as_ind()) {
				const inductive_decl* d = env.find_inductive(hi->ind);
				if (d && args.size() == d->params.size()) peel = false;
			}
		}
	}
	if (peel) {
		const t_app* a = ty.as_app();
		term type_of_x = try_infer(env, ctx, lift(2 * n, 0, a->arg));
		term eqn = mk_apps(mk_ind("eq"), {type_of_x, mk_rel(0), lift(2 * n + 1, 0, a->arg)});
		context ctx2 = ctx_push(ctx, local_decl{name::of("x"), type_of_x, std::nullopt});
		ctx2 = ctx_push(std::move(ctx2), local_decl{name::anon(), eqn, std::nullopt});
		term rest = abstract_eqns(env, ctx2, a->fn, n + 1, full_spine);
		return mk_prod(name::of("x"), type_of_x, mk_prod(name::anon(), eqn, rest));
	}
	std::vector<term> xs;
	for (std::size_t m = 0; m < n; ++m) xs.push_back(mk_rel(1 + 2 * m));
	return mk_apps(lift(2 * n, 0, ty), xs);
}

// A lambda telescope over the binders of gen_ty whose body transports the
// original constructor application across each abstracted equation,
// innermost equation first. Checks at gen_ty.
inline term build_transport_body(const global_env& env, const inductive_decl& ind, std::size_t ctor,
                                 const term& gen_ty) {
	auto [tele, head] = decompose_prod(gen_ty);
	const std::size_t T = tele.size();
	term closed = closed_ctor_type(ind, ctor);
	auto [orig_tele, orig_head] = decompose_prod(closed);
	const std::size_t p0 = orig_tele.size();
	const std::size_t q = (T - p0) / 2; // abstracted (x, eqn) pairs

	auto [param_head, orig_ixs] = split_index_spine(env, orig_head, ind);
	auto head_split = decompose_app(param_head);
	const term ind_term = head_split.first;
	const std::vector<term> ps0 = head_split.second;

	// everything below is scoped under the full telescope (depth T)
	std::vector<term> ps; // parameter spine, lifted from the original scope
	for (const auto& x : ps0) ps.push_back(lift(2 * q, 0, x));
	std::vector<term> lifted_ixs;
	for (const auto& x : orig_ixs) lifted_ixs.push_back(lift(2 * q, 0, x));

	// original constructor application over the first p0 binders
	std::vector<term> orig_args;
	for (std::size_t i = 0; i < p0; ++i) orig_args.push_back(mk_rel(T - 1 - i));
	term cur = mk_apps(mk_construct(ind.iname, ctor), orig_args);

	// index slot s is inhabited by x_s = Rel(2s + 1), its equation by
	// Rel(2s); goal_slots(s, y, extra) is the inductive applied with slots
	// below s already rewritten, slot s set to y, the rest original
	auto goal = [&](std::size_t s, const term& slot_s, std::size_t extra) {
		std::vector<term> args;
		for (const auto& x : ps) args.push_back(lift(extra, 0, x));
		for (std::size_t r = 0; r < q; ++r) {
			if (r < s)
				args.push_back(mk_rel(2 * r + 1 + extra));
			else if (r == s)
				args.push_back(slot_s);
			else
				args.push_back(lift(extra, 0, lifted_ixs[r]));
		}
		return mk_apps(ind_term, args);
	};

	for (std::size_t s = 0; s < q; ++s) {
		term x_s = mk_rel(2 * s + 1);
		term h_s = mk_rel(2 * s);
		term ty_s = infer(env, tele, lifted_ixs[s]);
		// motive: fun (y : T_s) (e : eq T_s x_s y) => goal(y) -> goal(x_s)
		term from = goal(s, mk_rel(1), 2);
		term to = goal(s, lift(2, 0, x_s), 2);
		term motive =
		    mk_lam(name::of("y"), ty_s,
		           mk_lam(name::of("e"),
		                  mk_apps(mk_ind("eq"), {lift(1, 0, ty_s), lift(1, 0, x_s), mk_rel(0)}),
		                  mk_impl(from, to)));
		term branch = mk_lam(name::of("t"), goal(s, x_s, 0), mk_rel(0));
		cur = mk_app(mk_case("eq", motive, h_s, {branch}), cur);
	}
	return compose_lam(tele, cur);
}

// The whole plugin: abstract the index equations, build the transport
// body, and kernel-check the definition at its derived type.
inline derived_def derive_generalized_constructor(const global_env& env, const genctor_request& req,
                                                  bool check_it = true) {
	const auto* c = env.find_constructor(req.ctor);
	if (!c)
		throw type_error(type_error_kind::unknown_global, {}, mk_const(req.ctor),
		                 "unknown constructor " + req.ctor);
	if (env.contains(req.new_name)) throw name_clash_error(req.new_name);
	const inductive_decl& ind = *env.find_inductive(c->first);

	term gen_ty = abstract_eqns(env, {}, closed_ctor_type(ind, c->second), 0);
	term body = build_transport_body(env, ind, c->second, gen_ty);

	derived_def out;
	out.dname = req.new_name;
	if (check_it) {
		check(env, {}, body, gen_ty);
		guard_check(env, body);
		out.checked = true;
	}
	out.payload = definition{gen_ty, body};
	return out;
}

} // namespace derivekit
