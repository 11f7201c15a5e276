// Reduction, conversion, bidirectional type inference/checking, inductive
// well-formedness (strict positivity), fixpoint guard checking, and a
// closed-term enumerator used as a test oracle.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "derivekit/env.hpp"
#include "derivekit/term.hpp"

namespace derivekit {

enum class type_error_kind {
	unbound_rel,
	not_a_function,
	mismatch,
	not_a_sort,
	ill_formed_case,
	guard_violation,
	positivity_violation,
	unknown_global,
};

inline const char* type_error_kind_name(type_error_kind k) {
	switch (k) {
	case type_error_kind::unbound_rel: return "UnboundRel";
	case type_error_kind::not_a_function: return "NotAFunction";
	case type_error_kind::mismatch: return "Mismatch";
	case type_error_kind::not_a_sort: return "NotASort";
	case type_error_kind::ill_formed_case: return "IllFormedCase";
	case type_error_kind::guard_violation: return "GuardViolation";
	case type_error_kind::positivity_violation: return "PositivityViolation";
	case type_error_kind::unknown_global: return "UnknownGlobal";
	}
	return "TypeError";
}

class type_error : public std::runtime_error {
public:
	type_error(type_error_kind k, context c, term subj, std::string det = "")
	    : std::runtime_error(std::string(type_error_kind_name(k)) + (det.empty() ? "" : ": " + det)),
	      kind(k), ctx(std::move(c)), subject(std::move(subj)), detail(std::move(det)) {}

	type_error(type_error_kind k, context c, term subj, term exp, term g, std::string det = "")
	    : type_error(k, std::move(c), std::move(subj), std::move(det)) {
		expected.emplace(std::move(exp));
		got.emplace(std::move(g));
	}

	type_error_kind kind;
	context ctx;
	term subject;
	std::optional<term> expected;
	std::optional<term> got;
	std::string detail;
};

class unsupported_error : public std::runtime_error {
public:
	explicit unsupported_error(const std::string& what) : std::runtime_error(what) {}
};

inline std::size_t ctor_arg_count(const inductive_decl& d, std::size_t j) {
	return decompose_prod(d.ctors.at(j).ty).first.size();
}

// Constructor type with parameters instantiated (still scoped for args).
inline term instantiate_ctor_type(const inductive_decl& d, std::size_t j, const std::vector<term>& ps) {
	std::vector<term> rev(ps.rbegin(), ps.rend());
	return subst_many(d.ctors.at(j).ty, rev);
}

// Index telescope with parameters instantiated.
inline context instantiate_indices(const inductive_decl& d, const std::vector<term>& ps) {
	context out;
	for (std::size_t j = 0; j < d.indices.size(); ++j) {
		term ty = d.indices[j].ty;
		// free Rels j..j+p-1 are the params, innermost first; each image is
		// lifted over the parameters still waiting to be substituted
		std::size_t i = 0;
		for (auto it = ps.rbegin(); it != ps.rend(); ++it, ++i)
			ty = subst(ty, j, lift(ps.size() - 1 - i, 0, *it));
		out.push_back(local_decl{d.indices[j].na, std::move(ty), std::nullopt});
	}
	return out;
}

// Weak-head normal form under beta, iota, fix unfolding, delta and zeta.
inline term whnf(const global_env& env, const context& ctx, term t) {
	// rev_args.back() is the innermost (first-applied) argument
	std::vector<term> rev_args;
	auto rebuild = [&](term head) {
		for (auto it = rev_args.rbegin(); it != rev_args.rend(); ++it)
			head = mk_app(std::move(head), *it);
		return head;
	};
	for (;;) {
		if (const auto* a = t.as_app()) {
			rev_args.push_back(a->arg);
			t = a->fn;
			continue;
		}
		if (const auto* l = t.as_lam()) {
			if (rev_args.empty()) return t;
			t = subst(l->body, 0, rev_args.back());
			rev_args.pop_back();
			continue;
		}
		if (const auto* l = t.as_let()) {
			t = subst(l->body, 0, l->val);
			continue;
		}
		if (const auto* c = t.as_const()) {
			const definition* def = env.find_definition(c->cname);
			if (!def) return rebuild(t);
			t = def->body;
			continue;
		}
		if (const auto* f = t.as_fix()) {
			if (rev_args.size() <= f->struct_arg) return rebuild(t);
			std::size_t pos = rev_args.size() - 1 - f->struct_arg;
			term sarg = whnf(env, ctx, rev_args[pos]);
			rev_args[pos] = sarg;
			auto head = decompose_app(sarg).first;
			if (!head.as_construct()) return rebuild(t);
			t = subst(f->body, 0, t);
			continue;
		}
		if (const auto* c = t.as_case()) {
			term scrut = whnf(env, ctx, c->scrutinee);
			auto [h, sargs] = decompose_app(scrut);
			const auto* con = h.as_construct();
			const inductive_decl* decl = env.find_inductive(c->ind);
			if (con && decl && con->ind == c->ind && c->branches.size() > con->idx &&
			    sargs.size() == decl->params.size() + ctor_arg_count(*decl, con->idx)) {
				term br = c->branches[con->idx];
				std::vector<term> rest(sargs.begin() + static_cast<long>(decl->params.size()), sargs.end());
				t = mk_apps(std::move(br), rest);
				continue;
			}
			return rebuild(mk_case(c->ind, c->motive, std::move(scrut), c->branches));
		}
		return rebuild(t);
	}
}

enum class conv_mode { eq, le };

// Definitional equality via weak-head reduction; `le` adds cumulativity
// (Prop <= Type(i), Type(i) <= Type(j) for i <= j), used in checking mode.
inline bool conv(const global_env& env, const context& ctx, const term& a, const term& b,
                 conv_mode mode = conv_mode::eq) {
	if (alpha_eq(a, b)) return true;
	term wa = whnf(env, ctx, a);
	term wb = whnf(env, ctx, b);
	if (wa.node().v.index() != wb.node().v.index()) return false;

	if (const auto* sa = wa.as_sort()) {
		const auto* sb = wb.as_sort();
		return mode == conv_mode::le ? sa->s.le(sb->s) : sa->s == sb->s;
	}
	if (const auto* pa = wa.as_prod()) {
		const auto* pb = wb.as_prod();
		if (!conv(env, ctx, pa->dom, pb->dom, conv_mode::eq)) return false;
		context ctx2 = ctx_push(ctx, local_decl{pa->na, pa->dom, std::nullopt});
		return conv(env, ctx2, pa->cod, pb->cod, mode);
	}
	if (const auto* la = wa.as_lam()) {
		const auto* lb = wb.as_lam();
		if (!conv(env, ctx, la->dom, lb->dom, conv_mode::eq)) return false;
		context ctx2 = ctx_push(ctx, local_decl{la->na, la->dom, std::nullopt});
		return conv(env, ctx2, la->body, lb->body, conv_mode::eq);
	}
	auto [ha, argsa] = decompose_app(wa);
	auto [hb, argsb] = decompose_app(wb);
	if (ha.node().v.index() != hb.node().v.index() || argsa.size() != argsb.size()) return false;
	bool heads = false;
	if (const auto* r = ha.as_rel()) {
		heads = r->index == hb.as_rel()->index;
	} else if (const auto* i = ha.as_ind()) {
		heads = i->ind == hb.as_ind()->ind;
	} else if (const auto* c = ha.as_construct()) {
		const auto* c2 = hb.as_construct();
		heads = c->ind == c2->ind && c->idx == c2->idx;
	} else if (const auto* k = ha.as_const()) {
		heads = k->cname == hb.as_const()->cname;
	} else if (const auto* ca = ha.as_case()) {
		const auto* cb = hb.as_case();
		heads = ca->ind == cb->ind && ca->branches.size() == cb->branches.size() &&
		        conv(env, ctx, ca->motive, cb->motive) && conv(env, ctx, ca->scrutinee, cb->scrutinee);
		for (std::size_t i = 0; heads && i < ca->branches.size(); ++i)
			heads = conv(env, ctx, ca->branches[i], cb->branches[i]);
	} else if (const auto* fa = ha.as_fix()) {
		const auto* fb = hb.as_fix();
		heads = fa->struct_arg == fb->struct_arg && conv(env, ctx, fa->ty, fb->ty);
		if (heads) {
			context ctx2 = ctx_push(ctx, local_decl{fa->na, fa->ty, std::nullopt});
			heads = conv(env, ctx2, fa->body, fb->body);
		}
	}
	if (!heads) return false;
	for (std::size_t i = 0; i < argsa.size(); ++i)
		if (!conv(env, ctx, argsa[i], argsb[i])) return false;
	return true;
}

inline term infer(const global_env& env, const context& ctx, const term& t);

inline sort infer_sort(const global_env& env, const context& ctx, const term& t) {
	term ty = whnf(env, ctx, infer(env, ctx, t));
	if (const auto* s = ty.as_sort()) return s->s;
	throw type_error(type_error_kind::not_a_sort, ctx, t);
}

inline void check(const global_env& env, const context& ctx, const term& t, const term& ty) {
	term got = infer(env, ctx, t);
	if (!conv(env, ctx, got, ty, conv_mode::le))
		throw type_error(type_error_kind::mismatch, ctx, t, ty, got);
}

// Prop is impredicative; Type is predicative with level max.
inline sort product_sort(sort s1, sort s2) {
	if (s2.is_prop()) return sort::prop();
	unsigned l1 = s1.is_prop() ? 0 : s1.level();
	return sort::type(std::max(l1, s2.level()));
}

inline term infer(const global_env& env, const context& ctx, const term& t) {
	if (const auto* s = t.as_sort()) {
		if (s->s.is_prop()) return mk_type(0);
		return mk_type(s->s.level() + 1);
	}
	if (const auto* r = t.as_rel()) {
		if (r->index >= ctx.size()) throw type_error(type_error_kind::unbound_rel, ctx, t);
		return lift(r->index + 1, 0, ctx[ctx.size() - 1 - r->index].ty);
	}
	if (const auto* p = t.as_prod()) {
		sort s1 = infer_sort(env, ctx, p->dom);
		context ctx2 = ctx_push(ctx, local_decl{p->na, p->dom, std::nullopt});
		sort s2 = infer_sort(env, ctx2, p->cod);
		return mk_sort(product_sort(s1, s2));
	}
	if (const auto* l = t.as_lam()) {
		infer_sort(env, ctx, l->dom);
		context ctx2 = ctx_push(ctx, local_decl{l->na, l->dom, std::nullopt});
		term bt = infer(env, ctx2, l->body);
		return mk_prod(l->na, l->dom, std::move(bt));
	}
	if (const auto* l = t.as_let()) {
		infer_sort(env, ctx, l->ty);
		check(env, ctx, l->val, l->ty);
		context ctx2 = ctx_push(ctx, local_decl{l->na, l->ty, l->val});
		term bt = infer(env, ctx2, l->body);
		return subst(bt, 0, l->val);
	}
	if (const auto* a = t.as_app()) {
		term ft = whnf(env, ctx, infer(env, ctx, a->fn));
		const auto* p = ft.as_prod();
		if (!p) throw type_error(type_error_kind::not_a_function, ctx, a->fn, ft, ft);
		check(env, ctx, a->arg, p->dom);
		return subst(p->cod, 0, a->arg);
	}
	if (const auto* i = t.as_ind()) {
		const inductive_decl* d = env.find_inductive(i->ind);
		if (!d) throw type_error(type_error_kind::unknown_global, ctx, t, "unknown inductive " + i->ind);
		return arity_of(*d);
	}
	if (const auto* c = t.as_construct()) {
		const inductive_decl* d = env.find_inductive(c->ind);
		if (!d || c->idx >= d->ctors.size())
			throw type_error(type_error_kind::unknown_global, ctx, t, "unknown constructor of " + c->ind);
		return closed_ctor_type(*d, c->idx);
	}
	if (const auto* k = t.as_const()) {
		const definition* d = env.find_definition(k->cname);
		if (!d) throw type_error(type_error_kind::unknown_global, ctx, t, "unknown constant " + k->cname);
		return d->ty;
	}
	if (const auto* f = t.as_fix()) {
		infer_sort(env, ctx, f->ty);
		context ctx2 = ctx_push(ctx, local_decl{f->na, f->ty, std::nullopt});
		check(env, ctx2, f->body, lift(1, 0, f->ty));
		return f->ty;
	}
	const auto* c = t.as_case();
	const inductive_decl* d = env.find_inductive(c->ind);
	if (!d) throw type_error(type_error_kind::unknown_global, ctx, t, "unknown inductive " + c->ind);
	const std::size_t p = d->params.size(), q = d->indices.size();

	term st = whnf(env, ctx, infer(env, ctx, c->scrutinee));
	auto [sh, sargs] = decompose_app(st);
	const auto* si = sh.as_ind();
	if (!si || si->ind != c->ind || sargs.size() != p + q)
		throw type_error(type_error_kind::ill_formed_case, ctx, t, "scrutinee is not a fully applied " + c->ind);
	std::vector<term> ps(sargs.begin(), sargs.begin() + static_cast<long>(p));
	std::vector<term> ixs(sargs.begin() + static_cast<long>(p), sargs.end());
	if (c->branches.size() != d->ctors.size())
		throw type_error(type_error_kind::ill_formed_case, ctx, t, "wrong branch count");

	// motive must be a function over the instantiated indices and scrutinee
	{
		term mt = infer(env, ctx, c->motive);
		context expected = instantiate_indices(*d, ps);
		std::vector<term> lifted_ps;
		for (const auto& x : ps) lifted_ps.push_back(lift(q, 0, x));
		expected.push_back(local_decl{
		    name::anon(), mk_apps(mk_ind(c->ind), [&] {
			    auto v = lifted_ps;
			    auto rels = telescope_rels(q);
			    v.insert(v.end(), rels.begin(), rels.end());
			    return v;
		    }()),
		    std::nullopt});
		context mctx = ctx;
		for (const auto& dom : expected) {
			term w = whnf(env, mctx, mt);
			const auto* pr = w.as_prod();
			if (!pr) throw type_error(type_error_kind::ill_formed_case, ctx, c->motive, "motive arity too short");
			if (!conv(env, mctx, pr->dom, dom.ty))
				throw type_error(type_error_kind::ill_formed_case, ctx, c->motive, "motive domain mismatch");
			mctx = ctx_push(mctx, local_decl{pr->na, pr->dom, std::nullopt});
			mt = pr->cod;
		}
		term w = whnf(env, mctx, mt);
		if (!w.as_sort())
			throw type_error(type_error_kind::ill_formed_case, ctx, c->motive, "motive does not end in a sort");
	}

	for (std::size_t j = 0; j < d->ctors.size(); ++j) {
		term cty = instantiate_ctor_type(*d, j, ps);
		auto [tele, head] = decompose_prod(cty);
		auto [hh, hargs] = decompose_app(head);
		std::size_t n = tele.size();
		std::vector<term> res_ps(hargs.begin(), hargs.begin() + static_cast<long>(p));
		std::vector<term> res_ixs(hargs.begin() + static_cast<long>(p), hargs.end());
		std::vector<term> motive_args = res_ixs;
		std::vector<term> ctor_args = res_ps;
		auto rels = telescope_rels(n);
		ctor_args.insert(ctor_args.end(), rels.begin(), rels.end());
		motive_args.push_back(mk_apps(mk_construct(c->ind, j), ctor_args));
		term expected_branch = compose_prod(tele, mk_apps(lift(n, 0, c->motive), motive_args));
		check(env, ctx, c->branches[j], expected_branch);
	}

	std::vector<term> result_args = ixs;
	result_args.push_back(c->scrutinee);
	return mk_apps(c->motive, result_args);
}

// infer's result, or the literal term Rel 0 on any error.
inline term try_infer(const global_env& env, const context& ctx, const term& t) {
	try {
		return infer(env, ctx, t);
	} catch (const type_error&) {
		return mk_rel(0);
	}
}

// ---------------------------------------------------------------------------
// strict positivity

namespace detail {

// Occurrence target: either a named inductive, or a de Bruijn variable
// (index valid at offset 0).
struct occ_target {
	std::optional<std::string> ind;
	std::size_t rel = 0;
	bool occurs(const term& t, std::size_t depth) const {
		return ind ? occurs_ind(t, *ind) : occurs_rel(t, rel + depth);
	}
	bool is_head(const term& h, std::size_t depth) const {
		if (ind) {
			const auto* i = h.as_ind();
			return i && i->ind == *ind;
		}
		const auto* r = h.as_rel();
		return r && r->index == rel + depth;
	}
};

using positivity_memo = std::map<std::string, bool>;

inline bool param_strictly_positive(const global_env& env, const std::string& cind, std::size_t slot,
                                    positivity_memo& memo);

// The instantiation of a nested parameter slot: either the target applied to
// target-free arguments, or a deeper nesting through a positive parameter.
inline bool nested_instance_ok(const global_env& env, const occ_target& tgt, const term& inst,
                               std::size_t depth, positivity_memo& memo) {
	auto [h, args] = decompose_app(inst);
	if (tgt.is_head(h, depth)) {
		for (const auto& a : args)
			if (tgt.occurs(a, depth)) return false;
		return true;
	}
	if (const auto* i = h.as_ind()) {
		const inductive_decl* d = env.find_inductive(i->ind);
		if (!d) return false;
		for (std::size_t k = 0; k < args.size(); ++k) {
			if (!tgt.occurs(args[k], depth)) continue;
			if (k >= d->params.size()) return false;
			if (!param_strictly_positive(env, i->ind, k, memo)) return false;
			if (!nested_instance_ok(env, tgt, args[k], depth, memo)) return false;
		}
		return true;
	}
	return false;
}

// Strict positivity of one constructor-argument type w.r.t. the target.
inline bool arg_strictly_positive(const global_env& env, const occ_target& tgt, term argty,
                                  std::size_t depth, positivity_memo& memo) {
	if (!tgt.occurs(argty, depth)) return true;
	while (const auto* p = argty.as_prod()) {
		if (tgt.occurs(p->dom, depth)) return false;
		argty = p->cod;
		++depth;
	}
	auto [h, args] = decompose_app(argty);
	if (tgt.is_head(h, depth)) {
		for (const auto& a : args)
			if (tgt.occurs(a, depth)) return false;
		return true;
	}
	if (const auto* i = h.as_ind()) {
		const inductive_decl* d = env.find_inductive(i->ind);
		if (!d) return false;
		for (std::size_t k = 0; k < args.size(); ++k) {
			if (!tgt.occurs(args[k], depth)) continue;
			if (k >= d->params.size()) return false;
			if (!param_strictly_positive(env, i->ind, k, memo)) return false;
			if (!nested_instance_ok(env, tgt, args[k], depth, memo)) return false;
		}
		return true;
	}
	return false;
}

inline bool param_strictly_positive(const global_env& env, const std::string& cind, std::size_t slot,
                                    positivity_memo& memo) {
	std::string key = cind + "#" + std::to_string(slot);
	auto it = memo.find(key);
	if (it != memo.end()) return it->second;
	memo[key] = true; // pending occurrences are resolved coinductively
	const inductive_decl* d = env.find_inductive(cind);
	if (!d || slot >= d->params.size()) return memo[key] = false;
	occ_target tgt{std::nullopt, d->params.size() - 1 - slot};
	for (const auto& ctor : d->ctors) {
		auto [tele, head] = decompose_prod(ctor.ty);
		for (std::size_t j = 0; j < tele.size(); ++j)
			if (!arg_strictly_positive(env, tgt, tele[j].ty, j, memo)) return memo[key] = false;
		(void)head; // occurrences in the result head are positive
	}
	return memo[key] = true;
}

} // namespace detail

// Arity and constructor types well-typed; every self-occurrence strictly
// positive, directly or nested through parameters of earlier inductives.
inline void check_inductive(const global_env& env, const inductive_decl& decl) {
	global_env scratch = env;
	scratch.add_inductive(decl);

	term arity = arity_of(decl);
	infer_sort(scratch, {}, arity);

	const std::size_t p = decl.params.size(), q = decl.indices.size();
	detail::positivity_memo memo;
	for (std::size_t j = 0; j < decl.ctors.size(); ++j) {
		term cty = closed_ctor_type(decl, j);
		infer_sort(scratch, {}, cty);

		auto [tele, head] = decompose_prod(cty);
		auto [h, args] = decompose_app(head);
		const auto* hi = h.as_ind();
		if (!hi || hi->ind != decl.iname || args.size() != p + q)
			throw type_error(type_error_kind::positivity_violation, {}, cty,
			                 "constructor " + decl.ctors[j].cname +
			                     " does not end in the fully applied inductive");
		for (std::size_t i = 0; i < p; ++i)
			if (!args[i].as_rel() || args[i].as_rel()->index != tele.size() - 1 - i)
				throw type_error(type_error_kind::positivity_violation, {}, cty,
				                 "constructor " + decl.ctors[j].cname +
				                     " does not apply the inductive to its parameters uniformly");
		for (std::size_t i = p; i < args.size(); ++i)
			if (occurs_ind(args[i], decl.iname))
				throw type_error(type_error_kind::positivity_violation, {}, cty,
				                 "self-occurrence in a result index of " + decl.ctors[j].cname);

		detail::occ_target tgt{decl.iname, 0};
		for (std::size_t i = 0; i < tele.size(); ++i)
			if (!detail::arg_strictly_positive(scratch, tgt, tele[i].ty, i, memo))
				throw type_error(type_error_kind::positivity_violation, {}, tele[i].ty,
				                 "non-strictly-positive occurrence in argument " + std::to_string(i) +
				                     " of " + decl.ctors[j].cname);
	}
}

// ---------------------------------------------------------------------------
// guard condition

namespace detail {

struct guard_var {
	std::set<std::size_t> strict_for; // fix ids whose argument this strictly descends from
	std::set<std::size_t> arg_of;     // fix ids whose structural argument this is
	bool fix_self = false;
	std::size_t fix_id = 0;
	std::size_t struct_pos = 0;
};

struct guard_state {
	const global_env& env;
	std::vector<guard_var> levels;
	std::size_t next_id = 0;
};

inline void guard_walk(guard_state& st, const term& t);

inline void guard_walk_fix(guard_state& st, const t_fix& f, const std::vector<term>& args) {
	guard_walk(st, f.ty);
	guard_var seed;
	if (args.size() > f.struct_arg) {
		if (const auto* r = args[f.struct_arg].as_rel()) {
			std::size_t lvl = st.levels.size() - 1 - r->index;
			seed.strict_for = st.levels[lvl].strict_for;
			for (auto id : st.levels[lvl].arg_of) seed.arg_of.insert(id);
		}
	}
	std::size_t id = st.next_id++;
	seed.arg_of.insert(id);

	guard_var self;
	self.fix_self = true;
	self.fix_id = id;
	self.struct_pos = f.struct_arg;
	st.levels.push_back(self);

	term body = f.body;
	std::size_t pos = 0;
	std::size_t pushed = 1;
	while (const auto* l = body.as_lam()) {
		guard_walk(st, l->dom);
		st.levels.push_back(pos == f.struct_arg ? seed : guard_var{});
		++pushed;
		++pos;
		body = l->body;
	}
	guard_walk(st, body);
	st.levels.resize(st.levels.size() - pushed);
}

inline void guard_walk(guard_state& st, const term& t) {
	auto [h, args] = decompose_app(t);

	if (const auto* r = h.as_rel()) {
		if (r->index < st.levels.size()) {
			const guard_var& v = st.levels[st.levels.size() - 1 - r->index];
			if (v.fix_self) {
				bool ok = false;
				if (args.size() > v.struct_pos) {
					if (const auto* ar = args[v.struct_pos].as_rel()) {
						if (ar->index < st.levels.size()) {
							const guard_var& av = st.levels[st.levels.size() - 1 - ar->index];
							ok = av.strict_for.count(v.fix_id) != 0;
						}
					}
				}
				if (!ok)
					throw type_error(type_error_kind::guard_violation, {}, t,
					                 "recursive call without a strict structural subterm");
			}
		}
		for (const auto& a : args) guard_walk(st, a);
		return;
	}
	if (const auto* f = h.as_fix()) {
		guard_walk_fix(st, *f, args);
		for (const auto& a : args) guard_walk(st, a);
		return;
	}
	if (const auto* c = h.as_case()) {
		guard_walk(st, c->motive);
		guard_walk(st, c->scrutinee);
		guard_var scrut;
		if (const auto* sr = c->scrutinee.as_rel()) {
			if (sr->index < st.levels.size()) scrut = st.levels[st.levels.size() - 1 - sr->index];
		}
		std::set<std::size_t> strict = scrut.strict_for;
		for (auto id : scrut.arg_of) strict.insert(id);
		const inductive_decl* d = st.env.find_inductive(c->ind);
		for (std::size_t j = 0; j < c->branches.size(); ++j) {
			std::size_t nargs = d && j < d->ctors.size() ? ctor_arg_count(*d, j) : 0;
			term b = c->branches[j];
			std::size_t pushed = 0;
			while (pushed < nargs) {
				const auto* l = b.as_lam();
				if (!l) break;
				guard_walk(st, l->dom);
				guard_var v;
				v.strict_for = strict;
				st.levels.push_back(v);
				++pushed;
				b = l->body;
			}
			guard_walk(st, b);
			st.levels.resize(st.levels.size() - pushed);
		}
		for (const auto& a : args) guard_walk(st, a);
		return;
	}
	// remaining heads: walk components with no special status
	h.visit(overloaded{
	    [&](const t_sort&) {},
	    [&](const t_rel&) {},
	    [&](const t_prod& p) {
		    guard_walk(st, p.dom);
		    st.levels.push_back({});
		    guard_walk(st, p.cod);
		    st.levels.pop_back();
	    },
	    [&](const t_lam& l) {
		    guard_walk(st, l.dom);
		    st.levels.push_back({});
		    guard_walk(st, l.body);
		    st.levels.pop_back();
	    },
	    [&](const t_let& l) {
		    guard_walk(st, l.val);
		    guard_walk(st, l.ty);
		    st.levels.push_back({});
		    guard_walk(st, l.body);
		    st.levels.pop_back();
	    },
	    [&](const t_app&) {},
	    [&](const t_ind&) {},
	    [&](const t_construct&) {},
	    [&](const t_case&) {},
	    [&](const t_fix&) {},
	    [&](const t_const&) {}});
	for (const auto& a : args) guard_walk(st, a);
}

} // namespace detail

// Checks every fixpoint inside t: each recursive call must consume a strict
// structural subterm of the decreasing argument. Strictness is conferred by
// Case on the argument (or on a strict subterm), and flows through nested
// fixpoints whose own structural argument is strict.
inline void guard_check(const global_env& env, const term& t) {
	detail::guard_state st{env, {}, 0};
	detail::guard_walk(st, t);
}

// ---------------------------------------------------------------------------
// normalization

inline term normalize(const global_env& env, const context& ctx, const term& t0) {
	term t = whnf(env, ctx, t0);
	return t.visit(overloaded{
	    [&](const t_sort&) { return t; },
	    [&](const t_rel&) { return t; },
	    [&](const t_prod& p) {
		    context ctx2 = ctx_push(ctx, local_decl{p.na, p.dom, std::nullopt});
		    return mk_prod(p.na, normalize(env, ctx, p.dom), normalize(env, ctx2, p.cod));
	    },
	    [&](const t_lam& l) {
		    context ctx2 = ctx_push(ctx, local_decl{l.na, l.dom, std::nullopt});
		    return mk_lam(l.na, normalize(env, ctx, l.dom), normalize(env, ctx2, l.body));
	    },
	    [&](const t_let& l) {
		    // unreachable after zeta, kept for totality
		    return normalize(env, ctx, subst(l.body, 0, l.val));
	    },
	    [&](const t_app& a) { return mk_app(normalize(env, ctx, a.fn), normalize(env, ctx, a.arg)); },
	    [&](const t_ind&) { return t; },
	    [&](const t_construct&) { return t; },
	    [&](const t_case& c) {
		    std::vector<term> brs;
		    for (const auto& b : c.branches) brs.push_back(normalize(env, ctx, b));
		    return mk_case(c.ind, normalize(env, ctx, c.motive), normalize(env, ctx, c.scrutinee),
		                   std::move(brs));
	    },
	    [&](const t_fix& f) {
		    context ctx2 = ctx_push(ctx, local_decl{f.na, f.ty, std::nullopt});
		    return mk_fix(f.na, f.struct_arg, normalize(env, ctx, f.ty), normalize(env, ctx2, f.body));
	    },
	    [&](const t_const&) { return t; }});
}

// ---------------------------------------------------------------------------
// closed-term enumeration (test oracle)

namespace detail {

inline void enumerate_tele(const global_env& env, const term& target, const std::string& iname,
                           std::size_t ctor, const std::vector<term>& ps, term rest,
                           std::vector<term>& chosen, std::size_t budget, std::vector<term>& out);

inline std::vector<term> enumerate_closed(const global_env& env, const term& ty, std::size_t max_depth) {
	term w = whnf(env, {}, ty);
	auto [h, args] = decompose_app(w);
	const auto* hi = h.as_ind();
	if (!hi) throw unsupported_error("enumeration target is not an inductive type");
	const inductive_decl* d = env.find_inductive(hi->ind);
	if (!d || args.size() != d->params.size() + d->indices.size())
		throw unsupported_error("enumeration target is not fully applied");
	std::vector<term> ps(args.begin(), args.begin() + static_cast<long>(d->params.size()));
	std::vector<term> out;
	for (std::size_t j = 0; j < d->ctors.size(); ++j) {
		term cty = instantiate_ctor_type(*d, j, ps);
		bool nullary = !cty.as_prod();
		if (!nullary && max_depth == 0) continue;
		std::vector<term> chosen;
		enumerate_tele(env, w, hi->ind, j, ps, cty, chosen, nullary ? max_depth : max_depth - 1, out);
	}
	return out;
}

inline void enumerate_tele(const global_env& env, const term& target, const std::string& iname,
                           std::size_t ctor, const std::vector<term>& ps, term rest,
                           std::vector<term>& chosen, std::size_t budget, std::vector<term>& out) {
	if (const auto* p = rest.as_prod()) {
		for (const auto& v : enumerate_closed(env, p->dom, budget)) {
			chosen.push_back(v);
			enumerate_tele(env, target, iname, ctor, ps, subst(p->cod, 0, v), chosen, budget, out);
			chosen.pop_back();
		}
		return;
	}
	if (!conv(env, {}, rest, target)) return;
	std::vector<term> all = ps;
	all.insert(all.end(), chosen.begin(), chosen.end());
	out.push_back(mk_apps(mk_construct(iname, ctor), all));
}

} // namespace detail

// All closed constructor-normal terms of the given fully applied inductive
// type, constructor-nesting depth <= max_depth (nullary constructors have
// depth 0), in deterministic order.
inline std::vector<term> enumerate_closed_terms(const global_env& env, const term& ty,
                                                std::size_t max_depth) {
	return detail::enumerate_closed(env, ty, max_depth);
}

} // namespace derivekit
