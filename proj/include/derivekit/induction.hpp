// Induction principles for (nested) inductive types: unary parametricity
// translation of containers (is_list and friends), motive and case
// construction with parameters quantified inside the motive, and a guarded
// fixpoint proof term. nested=false reproduces the plain principle that
// ignores nested recursive occurrences.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "derivekit/deriving.hpp"
#include "derivekit/env.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/term.hpp"

namespace derivekit {

struct scheme_request {
	std::string ind;
	bool nested = true;
	std::string sname; // empty: <ind>_ind_MC
};

inline inductive_decl param_translate_inductive(global_env& env, const std::string& ind);

namespace detail {

// Renames free variables of t by level: t is scoped in an original context
// of depth map.size() (level 0 outermost); map[l] gives the level of the
// same variable in a new context of depth new_depth.
inline term rename_levels(const term& t, const std::vector<std::size_t>& map, std::size_t new_depth,
                          std::size_t inner = 0) {
	return t.visit(overloaded{
	    [&](const t_sort&) { return t; },
	    [&](const t_rel& r) {
		    if (r.index < inner) return t;
		    std::size_t level = map.size() - 1 - (r.index - inner);
		    return mk_rel(new_depth - 1 - map.at(level) + inner);
	    },
	    [&](const t_prod& p) {
		    return mk_prod(p.na, rename_levels(p.dom, map, new_depth, inner),
		                   rename_levels(p.cod, map, new_depth, inner + 1));
	    },
	    [&](const t_lam& l) {
		    return mk_lam(l.na, rename_levels(l.dom, map, new_depth, inner),
		                  rename_levels(l.body, map, new_depth, inner + 1));
	    },
	    [&](const t_let& l) {
		    return mk_let(l.na, rename_levels(l.val, map, new_depth, inner),
		                  rename_levels(l.ty, map, new_depth, inner),
		                  rename_levels(l.body, map, new_depth, inner + 1));
	    },
	    [&](const t_app& a) {
		    return mk_app(rename_levels(a.fn, map, new_depth, inner),
		                  rename_levels(a.arg, map, new_depth, inner));
	    },
	    [&](const t_ind&) { return t; },
	    [&](const t_construct&) { return t; },
	    [&](const t_case& c) {
		    std::vector<term> brs;
		    for (const auto& b : c.branches) brs.push_back(rename_levels(b, map, new_depth, inner));
		    return mk_case(c.ind, rename_levels(c.motive, map, new_depth, inner),
		                   rename_levels(c.scrutinee, map, new_depth, inner), std::move(brs));
	    },
	    [&](const t_fix& f) {
		    return mk_fix(f.na, f.struct_arg, rename_levels(f.ty, map, new_depth, inner),
		                  rename_levels(f.body, map, new_depth, inner + 1));
	    },
	    [&](const t_const&) { return t; }});
}

// Sort-kinded parameters receive predicates under the translation.
inline std::vector<std::size_t> predicated_params(const inductive_decl& d) {
	std::vector<std::size_t> out;
	for (std::size_t j = 0; j < d.params.size(); ++j)
		if (d.params[j].ty.as_sort()) out.push_back(j);
	return out;
}

// Does a source constructor-argument type (scoped in the source parameter
// context plus `depth` earlier binders) mention the inductive itself or a
// predicated parameter?
inline bool mentions_translated(const inductive_decl& d, const term& argty, std::size_t depth) {
	if (occurs_ind(argty, d.iname)) return true;
	for (std::size_t j : predicated_params(d))
		if (occurs_rel(argty, depth + d.params.size() - 1 - j)) return true;
	return false;
}

// Builds the predicate term of type `T -> Type` for a translated argument
// type T, already expressed in the target scope of depth D.
//   self occurrences     -> self_pred(index spine)
//   predicated param Rel -> its predicate variable (param_pred)
//   container instances  -> is_C applied to instantiated predicates
struct pred_builder {
	global_env& env;
	const inductive_decl& src;
	// level of the predicate variable for source param j, if any
	std::vector<std::optional<std::size_t>> param_pred_level;
	// predicate for a self instance: receives the occurrence's index spine
	// and the current depth
	std::function<term(const std::vector<term>&, std::size_t)> self_pred;
	// true when param Rels themselves count as translated content
	bool predicate_params = true;

	bool is_self_head(const term& h) const {
		const auto* i = h.as_ind();
		return i && i->ind == src.iname;
	}

	bool needs(const term& ty, std::size_t depth) const {
		if (occurs_ind(ty, src.iname)) return true;
		if (!predicate_params) return false;
		for (std::size_t l = 0; l < param_pred_level.size(); ++l)
			if (param_pred_level[l] && occurs_rel(ty, depth - 1 - l)) return true;
		return false;
	}

	term build(const term& ty, std::size_t depth) const {
		auto [h, args] = decompose_app(ty);
		if (const auto* r = h.as_rel()) {
			if (!args.empty())
				throw unsupported_error("cannot translate an applied variable argument type");
			std::size_t level = depth - 1 - r->index;
			if (level < param_pred_level.size() && param_pred_level[level])
				return mk_rel(depth - 1 - *param_pred_level[level]);
			throw unsupported_error("no predicate available for this variable");
		}
		if (is_self_head(h)) {
			const std::size_t p = src.params.size();
			if (args.size() != p + src.indices.size())
				throw unsupported_error("self occurrence is not fully applied");
			std::vector<term> ixs(args.begin() + static_cast<long>(p), args.end());
			for (const auto& a : ixs)
				if (occurs_ind(a, src.iname))
					throw unsupported_error("self occurrence inside an index");
			return self_pred(ixs, depth);
		}
		if (const auto* hi = h.as_ind()) {
			const inductive_decl* found = env.find_inductive(hi->ind);
			if (!found || args.size() != found->params.size() + found->indices.size())
				throw unsupported_error("container instance is not fully applied");
			const inductive_decl cd = *found; // env may grow below
			inductive_decl is_c = param_translate_inductive(env, hi->ind);
			std::vector<term> tsc(args.begin(), args.begin() + static_cast<long>(cd.params.size()));
			std::vector<term> tsi(args.begin() + static_cast<long>(cd.params.size()), args.end());
			for (const auto& ix : tsi)
				if (needs(ix, depth))
					throw unsupported_error("translated content in a container index position");
			std::vector<term> out = tsc;
			for (std::size_t j : predicated_params(cd)) {
				if (!needs(tsc[j], depth))
					throw unsupported_error(
					    "container parameter without translated content needs a trivial predicate");
				out.push_back(build(tsc[j], depth));
			}
			out.insert(out.end(), tsi.begin(), tsi.end());
			return mk_apps(mk_ind(is_c.iname), out);
		}
		throw unsupported_error("argument type is not translatable");
	}
};

} // namespace detail

// The unary parametricity translation of an inductive: is_<ind> with the
// source parameters plus one predicate per sort-kinded parameter, the
// source indices plus a scrutinee of the source type, and one constructor
// per source constructor where every translated argument is followed by a
// witness. Registered in env if absent; memoized.
inline inductive_decl param_translate_inductive(global_env& env, const std::string& ind) {
	const inductive_decl* src = env.find_inductive(ind);
	if (!src)
		throw type_error(type_error_kind::unknown_global, {}, mk_ind(ind), "unknown inductive " + ind);
	const std::string tname = "is_" + ind;
	if (const inductive_decl* memo = env.find_inductive(tname)) return *memo;
	if (env.contains(tname)) throw name_clash_error(tname);

	const inductive_decl d = *src; // env may grow below; keep a copy
	const std::size_t p = d.params.size();
	const std::size_t q = d.indices.size();
	auto preds = detail::predicated_params(d);
	const std::size_t k = preds.size();

	inductive_decl out;
	out.iname = tname;
	out.s = sort::type(0);

	// params: source params, then one predicate per sort-kinded param
	out.params = d.params;
	for (std::size_t i = 0; i < k; ++i) {
		// at the i-th predicate binder the context is p params + i preds
		std::size_t rel = p + i - 1 - preds[i];
		out.params.push_back(
		    local_decl{name::of("P"), mk_impl(mk_rel(rel), mk_type(0)), std::nullopt});
	}

	// indices: source indices (shifted over the predicates) + scrutinee
	for (std::size_t j = 0; j < q; ++j) {
		local_decl ix = d.indices[j];
		ix.ty = lift(k, j, ix.ty);
		out.indices.push_back(std::move(ix));
	}
	{
		std::vector<term> args;
		for (std::size_t j = 0; j < p; ++j) args.push_back(mk_rel(p + k + q - 1 - j));
		auto rels = telescope_rels(q);
		args.insert(args.end(), rels.begin(), rels.end());
		out.indices.push_back(local_decl{name::anon(), mk_apps(mk_ind(ind), args), std::nullopt});
	}

	// predicate levels in the new scope, indexed by source param level
	std::vector<std::optional<std::size_t>> pred_level(p);
	for (std::size_t i = 0; i < k; ++i) pred_level[preds[i]] = p + i;

	detail::pred_builder pb{env, d, pred_level,
	                        [&](const std::vector<term>& ixs, std::size_t depth) {
		                        std::vector<term> args;
		                        for (std::size_t j = 0; j < p; ++j) args.push_back(mk_rel(depth - 1 - j));
		                        for (std::size_t i = 0; i < k; ++i)
			                        args.push_back(mk_rel(depth - 1 - (p + i)));
		                        args.insert(args.end(), ixs.begin(), ixs.end());
		                        return mk_apps(mk_ind(tname), args);
	                        },
	                        true};

	for (std::size_t j = 0; j < d.ctors.size(); ++j) {
		auto [tele, head] = decompose_prod(d.ctors[j].ty);
		const std::size_t n = tele.size();

		std::vector<std::size_t> rho(p); // orig level -> new level
		for (std::size_t l = 0; l < p; ++l) rho[l] = l;
		std::size_t depth = p + k;
		std::vector<std::pair<name, term>> binders;

		for (std::size_t i = 0; i < n; ++i) {
			term arg_ty = detail::rename_levels(tele[i].ty, rho, depth);
			binders.push_back({tele[i].na, arg_ty});
			rho.push_back(depth);
			++depth;
			if (detail::mentions_translated(d, tele[i].ty, i)) {
				term wty = mk_app(pb.build(lift(1, 0, arg_ty), depth), mk_rel(0));
				binders.push_back({name::anon(), wty});
				++depth;
			}
		}

		// head: is_<ind> ps preds ixs (c ps args)
		auto [hh, hargs] = decompose_app(head);
		std::vector<term> ixs;
		for (std::size_t m = p; m < hargs.size(); ++m)
			ixs.push_back(detail::rename_levels(hargs[m], rho, depth));
		std::vector<term> head_args;
		for (std::size_t l = 0; l < p; ++l) head_args.push_back(mk_rel(depth - 1 - l));
		for (std::size_t i = 0; i < k; ++i) head_args.push_back(mk_rel(depth - 1 - (p + i)));
		head_args.insert(head_args.end(), ixs.begin(), ixs.end());
		{
			std::vector<term> capp;
			for (std::size_t l = 0; l < p; ++l) capp.push_back(mk_rel(depth - 1 - l));
			for (std::size_t i = 0; i < n; ++i) capp.push_back(mk_rel(depth - 1 - rho[p + i]));
			head_args.push_back(mk_apps(mk_construct(ind, j), capp));
		}
		term ty = mk_apps(mk_ind(tname), head_args);
		for (auto it = binders.rbegin(); it != binders.rend(); ++it)
			ty = mk_prod(it->first, it->second, std::move(ty));
		out.ctors.push_back(constructor_decl{"is_" + d.ctors[j].cname, std::move(ty)});
	}

	check_inductive(env, out);
	env.add_inductive(out);
	return out;
}

// The motive type: forall params indices, ind params indices -> Type.
// Parameters are quantified inside the motive.
inline term build_motive(const global_env& env, const inductive_decl& ind) {
	(void)env;
	const std::size_t p = ind.params.size(), q = ind.indices.size();
	std::vector<term> args;
	for (std::size_t j = 0; j < p; ++j) args.push_back(mk_rel(p + q - 1 - j));
	auto rels = telescope_rels(q);
	args.insert(args.end(), rels.begin(), rels.end());
	term t = mk_impl(mk_apps(mk_ind(ind.iname), args), mk_type(0));
	t = compose_prod(ind.indices, std::move(t));
	return compose_prod(ind.params, std::move(t));
}

// The hypothesis for one constructor, scoped under the given motive term
// (callers pass the Rel of the motive binder). Quantifies the parameters,
// then the constructor arguments; recursive arguments are followed by a
// motive application, nested container arguments (when nested=true) by an
// is_<container> witness with the motive filling the predicate slot.
inline term build_case_hypothesis(global_env& env, const inductive_decl& ind, std::size_t ctor,
                                  const term& motive, bool nested) {
	const std::size_t p = ind.params.size();
	const auto* mrel = motive.as_rel();
	if (!mrel) throw unsupported_error("motive must be a variable reference");
	const std::size_t base = mrel->index + 1; // depth at the hypothesis root
	const std::size_t mlevel = base - 1 - mrel->index;

	auto [tele, head] = decompose_prod(ind.ctors[ctor].ty);
	const std::size_t n = tele.size();

	// motive applied to an occurrence's parameter and index spine
	auto motive_partial = [&](const std::vector<term>& ixs, std::size_t depth) {
		std::vector<term> args;
		for (std::size_t l = 0; l < p; ++l) args.push_back(mk_rel(depth - 1 - (base + l)));
		args.insert(args.end(), ixs.begin(), ixs.end());
		return mk_apps(mk_rel(depth - 1 - mlevel), args);
	};

	detail::pred_builder pb{env,
	                        ind,
	                        std::vector<std::optional<std::size_t>>(p), // no param predicates
	                        motive_partial,
	                        false};

	std::vector<std::size_t> rho(p); // orig param level -> new level
	for (std::size_t l = 0; l < p; ++l) rho[l] = base + l;
	std::size_t depth = base + p;
	std::vector<std::pair<name, term>> binders;

	for (std::size_t i = 0; i < n; ++i) {
		term arg_ty = detail::rename_levels(tele[i].ty, rho, depth);
		binders.push_back({tele[i].na, arg_ty});
		rho.push_back(depth);
		++depth;
		if (!occurs_ind(tele[i].ty, ind.iname)) continue;
		term under = lift(1, 0, arg_ty);
		auto [h, args] = decompose_app(under);
		if (pb.is_self_head(h)) {
			// direct recursive argument: p ps ixs a
			std::vector<term> ixs(args.begin() + static_cast<long>(p), args.end());
			term hyp = mk_app(motive_partial(ixs, depth), mk_rel(0));
			binders.push_back({name::anon(), hyp});
			++depth;
		} else if (nested) {
			term hyp = mk_app(pb.build(under, depth), mk_rel(0));
			binders.push_back({name::anon(), hyp});
			++depth;
		}
	}

	std::vector<term> ixs;
	auto [hh, hargs] = decompose_app(head);
	for (std::size_t m = p; m < hargs.size(); ++m)
		ixs.push_back(detail::rename_levels(hargs[m], rho, depth));
	std::vector<term> capp;
	for (std::size_t l = 0; l < p; ++l) capp.push_back(mk_rel(depth - 1 - (base + l)));
	for (std::size_t i = 0; i < n; ++i) capp.push_back(mk_rel(depth - 1 - rho[p + i]));
	term conclusion = mk_app(motive_partial(ixs, depth), mk_apps(mk_construct(ind.iname, ctor), capp));

	for (auto it = binders.rbegin(); it != binders.rend(); ++it)
		conclusion = mk_prod(it->first, it->second, std::move(conclusion));
	return compose_prod(ind.params, conclusion);
}

// An inner fixpoint witnessing is_C for a container value whose element
// positions hold the recursive type: elements receive outer_call, spine
// positions recurse through the inner fixpoint, deeper containers recurse
// through this same construction. container_instance, pred, outer_call and
// arg are all scoped at the call site.
inline term build_nested_witness(global_env& env, const inductive_decl& src,
                                 const term& container_instance, const term& pred,
                                 const term& outer_call, const term& arg) {
	auto [ch, cargs] = decompose_app(container_instance);
	const auto* ci = ch.as_ind();
	if (!ci) throw unsupported_error("nested witness target is not an inductive instance");
	const inductive_decl cd = *env.find_inductive(ci->ind);
	const std::size_t cp = cd.params.size(), cq = cd.indices.size();
	if (cargs.size() != cp + cq) throw unsupported_error("container instance is not fully applied");
	inductive_decl is_c = param_translate_inductive(env, ci->ind);

	std::vector<term> tsc(cargs.begin(), cargs.begin() + static_cast<long>(cp));
	std::vector<term> tsi(cargs.begin() + static_cast<long>(cp), cargs.end());

	detail::pred_builder pb{env, src, {},
	                        [&](const std::vector<term>& ixs, std::size_t depth) {
		                        // pred is already fully applied to the occurrence's
		                        // spine; depth counts binders below the call site
		                        (void)ixs;
		                        return lift(depth, 0, pred);
	                        },
	                        false};

	// predicate instances for is_C at `extra` binders below the call site
	auto preds_at = [&](std::size_t extra) {
		std::vector<term> out;
		for (std::size_t j : detail::predicated_params(cd)) {
			if (!pb.needs(tsc[j], 0))
				throw unsupported_error(
				    "container parameter without translated content needs a trivial predicate");
			out.push_back(pb.build(lift(extra, 0, tsc[j]), extra));
		}
		return out;
	};

	// G : forall ixs (l : C tsc ixs), is_C tsc preds ixs l, struct on l
	auto is_c_app = [&](std::size_t extra, const std::vector<term>& ixs, const term& value) {
		std::vector<term> args;
		for (const auto& x : tsc) args.push_back(lift(extra, 0, x));
		auto ps = preds_at(extra);
		args.insert(args.end(), ps.begin(), ps.end());
		args.insert(args.end(), ixs.begin(), ixs.end());
		args.push_back(value);
		return mk_apps(mk_ind(is_c.iname), args);
	};
	auto c_app = [&](std::size_t extra, const std::vector<term>& ixs) {
		std::vector<term> args;
		for (const auto& x : tsc) args.push_back(lift(extra, 0, x));
		args.insert(args.end(), ixs.begin(), ixs.end());
		return mk_apps(mk_ind(cd.iname), args);
	};

	term g_ty = [&] {
		// C's indices instantiated at tsc are already scoped for placement
		// right below the call site
		context ix_tele = instantiate_indices(cd, tsc);
		std::vector<term> ixrels = telescope_rels(cq, 1);
		term dom = c_app(cq, telescope_rels(cq));
		term cod = is_c_app(cq + 1, ixrels, mk_rel(0));
		term t = mk_prod(name::of("l"), dom, cod);
		return compose_prod(ix_tele, t);
	}();

	// body: fun ixs (l : ...) => match l ...   (scoped under the G binder)
	term g_body = [&] {
		const std::size_t dG = 1 + cq + 1; // G, indices, l
		std::vector<term> ixrels = telescope_rels(cq, 1);

		// motive: fun ixs' (l' : C tsc ixs') => is_C tsc preds ixs' l'
		term motive = [&] {
			context raw = instantiate_indices(cd, tsc);
			context ix_tele;
			std::size_t j = 0;
			for (auto& d : raw) {
				d.ty = lift(dG, j, d.ty); // dG binders now sit between
				ix_tele.push_back(d);
				++j;
			}
			term dom = c_app(dG + cq, telescope_rels(cq));
			term body = is_c_app(dG + cq + 1, telescope_rels(cq, 1), mk_rel(0));
			term t = mk_lam(name::of("l'"), dom, body);
			return compose_lam(ix_tele, t);
		}();

		std::vector<term> branches;
		for (std::size_t bj = 0; bj < cd.ctors.size(); ++bj) {
			std::vector<term> tsc_here;
			for (const auto& x : tsc) tsc_here.push_back(lift(dG, 0, x));
			term cty = instantiate_ctor_type(cd, bj, tsc_here);
			auto [tele, head] = decompose_prod(cty);
			const std::size_t nb = tele.size();
			const std::size_t db = dG + nb;

			std::vector<term> capp_args;
			for (const auto& x : tsc) capp_args.push_back(lift(db, 0, x));
			auto ps = preds_at(db);
			capp_args.insert(capp_args.end(), ps.begin(), ps.end());

			context orig_tele = decompose_prod(cd.ctors[bj].ty).first;
			for (std::size_t i = 0; i < nb; ++i) {
				term arg_rel = mk_rel(nb - 1 - i);
				capp_args.push_back(arg_rel);
				// the original argument type decides whether is_C has a
				// witness slot here
				if (!detail::mentions_translated(cd, orig_tele[i].ty, i)) continue;
				term u = lift(nb - i, 0, tele[i].ty); // arg type at branch depth
				auto [uh, uargs] = decompose_app(u);
				bool spine_position = false;
				if (const auto* ci2 = uh.as_ind(); ci2 && ci2->ind == cd.iname) {
					// the same container at the same parameters is the
					// recursive spine, whatever its indices
					spine_position = uargs.size() == cp + cq;
					for (std::size_t m = 0; spine_position && m < cp; ++m)
						spine_position = alpha_eq(uargs[m], lift(db, 0, tsc[m]));
				}
				if (pb.is_self_head(uh)) {
					// outer_call is already applied to the occurrence's spine
					capp_args.push_back(mk_app(lift(db, 0, outer_call), arg_rel));
				} else if (spine_position) {
					// recurse through G itself, at the argument's own indices
					std::vector<term> gargs(uargs.begin() + static_cast<long>(cp), uargs.end());
					gargs.push_back(arg_rel);
					capp_args.push_back(mk_apps(mk_rel(db - 1), gargs));
				} else {
					// a different (deeper) container: a fresh inner fixpoint
					capp_args.push_back(build_nested_witness(env, src, u, lift(db, 0, pred),
					                                         lift(db, 0, outer_call), arg_rel));
				}
			}
			term body = mk_apps(mk_construct(is_c.iname, bj), capp_args);
			for (auto it = tele.rbegin(); it != tele.rend(); ++it)
				body = mk_lam(it->na, it->ty, std::move(body));
			branches.push_back(std::move(body));
		}

		term body = mk_case(cd.iname, motive, mk_rel(0), std::move(branches));
		body = mk_lam(name::of("l"), c_app(1 + cq, telescope_rels(cq)), std::move(body));
		context ix_tele;
		{
			context raw = instantiate_indices(cd, tsc);
			std::size_t j = 0;
			for (auto& d : raw) {
				d.ty = lift(1, j, d.ty); // the G binder sits between
				ix_tele.push_back(d);
				++j;
			}
		}
		return compose_lam(ix_tele, body);
	}();

	term g = mk_fix(name::of("G"), cq, g_ty, g_body);
	std::vector<term> app = tsi;
	app.push_back(arg);
	return mk_apps(std::move(g), app);
}

// The whole plugin: derive <ind>_ind_MC with motive, one hypothesis per
// constructor, and a guarded fixpoint body; is_C translations forced along
// the way are returned so the session can register them first.
inline derived_def derive_induction(const global_env& env, const scheme_request& req,
                                    bool check_it = true) {
	const inductive_decl* srcp = env.find_inductive(req.ind);
	if (!srcp)
		throw type_error(type_error_kind::unknown_global, {}, mk_ind(req.ind),
		                 "unknown inductive " + req.ind);
	const inductive_decl src = *srcp;
	const std::string sname = req.sname.empty() ? req.ind + "_ind_MC" : req.sname;
	if (env.contains(sname)) throw name_clash_error(sname);

	global_env work = env;
	const std::size_t before = work.entries().size();
	const std::size_t p = src.params.size(), q = src.indices.size(), k = src.ctors.size();

	term motive_ty = build_motive(work, src);
	std::vector<term> hyps;
	for (std::size_t j = 0; j < k; ++j)
		hyps.push_back(build_case_hypothesis(work, src, j, mk_rel(0), req.nested));

	// conclusion tail: forall params indices (t : ind ps ixs), p ps ixs t,
	// scoped under the motive and `below` further binders
	auto build_tail = [&](std::size_t below) {
		std::size_t d = 1 + below + p + q; // depth at the scrutinee binder
		std::vector<term> spine;
		for (std::size_t l = 0; l < p; ++l) spine.push_back(mk_rel(d - 1 - (1 + below + l)));
		auto ixrels = telescope_rels(q);
		spine.insert(spine.end(), ixrels.begin(), ixrels.end());
		term dom = mk_apps(mk_ind(src.iname), spine);
		std::vector<term> concl;
		for (std::size_t l = 0; l < p; ++l) concl.push_back(mk_rel(d - (1 + below + l)));
		auto ixrels2 = telescope_rels(q, 1);
		concl.insert(concl.end(), ixrels2.begin(), ixrels2.end());
		concl.push_back(mk_rel(0));
		term t = mk_prod(name::of("t"), dom, mk_apps(mk_rel(d + 1 - 1 - 0), concl));
		t = compose_prod(src.indices, std::move(t));
		return compose_prod(src.params, std::move(t));
	};

	term scheme_ty = build_tail(k);
	for (std::size_t j = k; j-- > 0;) scheme_ty = mk_prod(name::anon(), lift(j, 0, hyps[j]), scheme_ty);
	scheme_ty = mk_prod(name::of("p"), motive_ty, std::move(scheme_ty));

	// body: fun p H.. => fix F params indices (t) := match t ...
	term body = [&] {
		const std::size_t dF = 1 + k + 1 + p + q + 1; // p, hyps, F, params, ixs, t
		term fix_ty = build_tail(k); // scoped outside the F binder

		// case motive: fun ixs' (t' : ind ps ixs') => p ps ixs' t'
		term case_motive = [&] {
			std::vector<term> ps_rels;
			for (std::size_t l = 0; l < p; ++l) ps_rels.push_back(mk_rel(dF - 1 - (1 + k + 1 + l)));
			context ix_tele = instantiate_indices(src, ps_rels);
			std::vector<term> spine;
			for (std::size_t l = 0; l < p; ++l) spine.push_back(mk_rel(dF + q - 1 - (1 + k + 1 + l)));
			auto ixrels = telescope_rels(q);
			spine.insert(spine.end(), ixrels.begin(), ixrels.end());
			term dom = mk_apps(mk_ind(src.iname), spine);
			std::vector<term> concl;
			for (std::size_t l = 0; l < p; ++l) concl.push_back(mk_rel(dF + q + 1 - 1 - (1 + k + 1 + l)));
			auto ixrels2 = telescope_rels(q, 1);
			concl.insert(concl.end(), ixrels2.begin(), ixrels2.end());
			concl.push_back(mk_rel(0));
			term t = mk_lam(name::of("t'"), dom, mk_apps(mk_rel(dF + q + 1 - 1), concl));
			return compose_lam(ix_tele, t);
		}();

		std::vector<term> ps_rels_fix;
		for (std::size_t l = 0; l < p; ++l) ps_rels_fix.push_back(mk_rel(dF - 1 - (1 + k + 1 + l)));

		std::vector<term> branches;
		for (std::size_t j = 0; j < k; ++j) {
			term cty = instantiate_ctor_type(src, j, ps_rels_fix);
			auto [tele, head] = decompose_prod(cty);
			const std::size_t nb = tele.size();
			const std::size_t db = dF + nb;

			std::vector<term> happ; // h_j applied to params, args and witnesses
			for (std::size_t l = 0; l < p; ++l) happ.push_back(mk_rel(db - 1 - (1 + k + 1 + l)));
			term f_rel = mk_rel(db - 1 - (1 + k));

			context orig_tele = decompose_prod(src.ctors[j].ty).first;
			for (std::size_t i = 0; i < nb; ++i) {
				term arg_rel = mk_rel(nb - 1 - i);
				happ.push_back(arg_rel);
				if (!occurs_ind(orig_tele[i].ty, src.iname)) continue;
				term u = lift(nb - i, 0, tele[i].ty); // at branch depth
				auto [uh, uargs] = decompose_app(u);
				const auto* ui = uh.as_ind();
				if (ui && ui->ind == src.iname) {
					std::vector<term> ixs(uargs.begin() + static_cast<long>(p), uargs.end());
					std::vector<term> fargs;
					for (std::size_t l = 0; l < p; ++l) fargs.push_back(mk_rel(db - 1 - (1 + k + 1 + l)));
					fargs.insert(fargs.end(), ixs.begin(), ixs.end());
					fargs.push_back(arg_rel);
					happ.push_back(mk_apps(f_rel, fargs));
				} else if (req.nested) {
					// the motive and F apply at the deepest self instance's
					// spine; intermediate container levels are handled inside
					// the witness itself
					std::function<term(const term&)> innermost = [&](const term& t) -> term {
						auto [h2, args2] = decompose_app(t);
						if (h2.as_ind() && h2.as_ind()->ind == src.iname) return t;
						const inductive_decl* cd2 = env.find_inductive(h2.as_ind()->ind);
						if (!cd2) throw unsupported_error("no self instance in container parameters");
						for (std::size_t m = 0; m < cd2->params.size() && m < args2.size(); ++m)
							if (occurs_ind(args2[m], src.iname)) return innermost(args2[m]);
						throw unsupported_error("no self instance in container parameters");
					};
					term self_occ = innermost(u);
					auto [sh, sargs] = decompose_app(self_occ);
					std::vector<term> ixs(sargs.begin() + static_cast<long>(p), sargs.end());
					std::vector<term> pargs;
					for (std::size_t l = 0; l < p; ++l) pargs.push_back(mk_rel(db - 1 - (1 + k + 1 + l)));
					pargs.insert(pargs.end(), ixs.begin(), ixs.end());
					term pred = mk_apps(mk_rel(db - 1), pargs);
					term outer_call = mk_apps(f_rel, pargs);
					happ.push_back(build_nested_witness(work, src, u, pred, outer_call, arg_rel));
				}
			}

			term bt = mk_apps(mk_rel(db - 1 - (1 + j)), happ);
			for (auto it = tele.rbegin(); it != tele.rend(); ++it)
				bt = mk_lam(it->na, it->ty, std::move(bt));
			branches.push_back(std::move(bt));
		}

		term fix_body = mk_case(src.iname, case_motive, mk_rel(0), std::move(branches));
		{
			std::vector<term> spine;
			for (std::size_t l = 0; l < p; ++l) spine.push_back(mk_rel(dF - 1 - 1 - (1 + k + 1 + l)));
			auto ixrels = telescope_rels(q);
			spine.insert(spine.end(), ixrels.begin(), ixrels.end());
			fix_body = mk_lam(name::of("t"), mk_apps(mk_ind(src.iname), spine), fix_body);
		}
		{
			context ix_tele = instantiate_indices(src, [&] {
				std::vector<term> ps2;
				for (std::size_t l = 0; l < p; ++l) ps2.push_back(mk_rel(p - 1 - l));
				return ps2;
			}());
			fix_body = compose_lam(ix_tele, fix_body);
		}
		fix_body = compose_lam(src.params, fix_body); // params reference nothing outer
		term f = mk_fix(name::of("F"), p + q, fix_ty, fix_body);
		for (std::size_t j = k; j-- > 0;) f = mk_lam(name::of("H"), lift(j, 0, hyps[j]), std::move(f));
		return mk_lam(name::of("p"), motive_ty, std::move(f));
	}();

	derived_def out;
	out.dname = sname;
	for (std::size_t i = before; i < work.entries().size(); ++i)
		out.forced.push_back(std::get<inductive_decl>(work.entries()[i].payload));
	if (check_it) {
		check(work, {}, body, scheme_ty);
		guard_check(work, body);
		out.checked = true;
	}
	out.payload = definition{scheme_ty, body};
	return out;
}

} // namespace derivekit
