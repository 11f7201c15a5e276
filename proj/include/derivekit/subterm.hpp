// Direct subterm relations: one rule per directly recursive constructor
// argument, relating the argument to the constructed value. Nested
// occurrences are skipped with a warning. The relation quantifies two
// independent index telescopes, since a subterm of vec A (S n) lives at
// index n; parameters are shared across both sides.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "derivekit/deriving.hpp"
#include "derivekit/env.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/term.hpp"

namespace derivekit {

inline derived_def derive_subterm(const global_env& env, const std::string& ind,
                                  bool check_it = true) {
	const inductive_decl* srcp = env.find_inductive(ind);
	if (!srcp)
		throw type_error(type_error_kind::unknown_global, {}, mk_ind(ind), "unknown inductive " + ind);
	const inductive_decl& src = *srcp;
	const std::string rname = ind + "_direct_subterm";
	if (env.contains(rname)) throw name_clash_error(rname);
	const std::size_t p = src.params.size(), q = src.indices.size();

	inductive_decl rel;
	rel.iname = rname;
	rel.s = sort::prop();
	rel.params = src.params;

	// indices: ixs1, (a : ind ps ixs1), ixs2, (b : ind ps ixs2)
	for (const auto& ix : src.indices) rel.indices.push_back(ix);
	{
		std::vector<term> args;
		for (std::size_t l = 0; l < p; ++l) args.push_back(mk_rel(p + q - 1 - l));
		auto rels = telescope_rels(q);
		args.insert(args.end(), rels.begin(), rels.end());
		rel.indices.push_back(local_decl{name::anon(), mk_apps(mk_ind(ind), args), std::nullopt});
	}
	for (std::size_t j = 0; j < q; ++j) {
		local_decl ix = src.indices[j];
		ix.ty = lift(q + 1, j, ix.ty); // ixs1 and the subterm slot sit between
		rel.indices.push_back(std::move(ix));
	}
	{
		std::vector<term> args;
		for (std::size_t l = 0; l < p; ++l) args.push_back(mk_rel(p + 2 * q + 1 - 1 - l));
		auto rels = telescope_rels(q);
		args.insert(args.end(), rels.begin(), rels.end());
		rel.indices.push_back(local_decl{name::anon(), mk_apps(mk_ind(ind), args), std::nullopt});
	}

	derived_def out;
	out.dname = rname;
	bool nested_skipped = false;

	for (std::size_t j = 0; j < src.ctors.size(); ++j) {
		auto [tele, head] = decompose_prod(src.ctors[j].ty);
		const std::size_t n = tele.size();
		auto [hh, hargs] = decompose_app(head);
		std::size_t rule_k = 0;
		for (std::size_t i = 0; i < n; ++i) {
			if (!occurs_ind(tele[i].ty, ind)) continue;
			auto [ah, aargs] = decompose_app(tele[i].ty);
			const auto* ai = ah.as_ind();
			if (!ai || ai->ind != ind) {
				nested_skipped = true; // nested or higher-order occurrence
				continue;
			}
			// rule: forall <ctor args>, rel ps ixs_a a ixs_r (c ps args)
			std::vector<term> rapp;
			for (std::size_t l = 0; l < p; ++l) rapp.push_back(mk_rel(p + n - 1 - l));
			for (std::size_t m = p; m < aargs.size(); ++m)
				rapp.push_back(lift(n - i, 0, aargs[m])); // from the arg's binder to full depth
			rapp.push_back(mk_rel(n - 1 - i));
			for (std::size_t m = p; m < hargs.size(); ++m) rapp.push_back(hargs[m]);
			{
				std::vector<term> capp;
				for (std::size_t l = 0; l < p; ++l) capp.push_back(mk_rel(p + n - 1 - l));
				auto rels = telescope_rels(n);
				capp.insert(capp.end(), rels.begin(), rels.end());
				rapp.push_back(mk_apps(mk_construct(ind, j), capp));
			}
			term rule = compose_prod(tele, mk_apps(mk_ind(rname), rapp));
			rel.ctors.push_back(
			    constructor_decl{src.ctors[j].cname + "_subterm" + std::to_string(rule_k), rule});
			out.rule_provenance.push_back({src.ctors[j].cname, i});
			++rule_k;
		}
	}

	if (nested_skipped)
		out.warnings.push_back("skipped nested recursive occurrences in " + ind);
	if (rel.ctors.empty())
		out.warnings.push_back(rname + " has no rules");

	if (check_it) {
		check_inductive(env, rel);
		out.checked = true;
	}
	out.payload = rel;
	return out;
}

// Semantic reading of the generated rules over enumerated closed terms:
// all pairs (a, t) where t is constructor-headed and a sits in a
// rule-designated argument position of t.
inline std::vector<std::pair<term, term>> direct_subterm_pairs(const global_env& env,
                                                               const derived_def& rel,
                                                               const std::vector<term>& universe) {
	std::vector<std::pair<term, term>> out;
	auto have = [&](const term& a, const term& b) {
		for (const auto& [x, y] : out)
			if (alpha_eq(x, a) && alpha_eq(y, b)) return true;
		return false;
	};
	for (const auto& t : universe) {
		auto [h, args] = decompose_app(t);
		const auto* c = h.as_construct();
		if (!c) continue;
		const inductive_decl* d = env.find_inductive(c->ind);
		if (!d) continue;
		const std::string& cname = d->ctors.at(c->idx).cname;
		for (const auto& [rc, pos] : rel.rule_provenance) {
			if (rc != cname) continue;
			const term& a = args.at(d->params.size() + pos);
			if (!have(a, t)) out.push_back({a, t});
		}
	}
	return out;
}

// One relational-composition step; iterating reaches the transitive
// closure on finite enumerations.
inline std::vector<std::pair<term, term>> transitive_closure_step(
    const global_env& env, const derived_def& rel, const std::vector<std::pair<term, term>>& pairs) {
	(void)env;
	(void)rel;
	std::vector<std::pair<term, term>> out = pairs;
	auto have = [&](const term& a, const term& b) {
		for (const auto& [x, y] : out)
			if (alpha_eq(x, a) && alpha_eq(y, b)) return true;
		return false;
	};
	for (const auto& [a, b] : pairs)
		for (const auto& [b2, c] : pairs)
			if (alpha_eq(b, b2) && !have(a, c)) out.push_back({a, c});
	return out;
}

inline std::vector<std::pair<term, term>> transitive_closure(
    const global_env& env, const derived_def& rel, std::vector<std::pair<term, term>> pairs) {
	for (;;) {
		auto next = transitive_closure_step(env, rel, pairs);
		if (next.size() == pairs.size()) return next;
		pairs = std::move(next);
	}
}

} // namespace derivekit
