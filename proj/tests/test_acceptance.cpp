// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Run directly (or via ctest) to see the ledger.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "derivekit/derivekit.hpp"
#include "test_support.hpp"

using namespace derivekit;
using testsupport::corpus_env;
using testsupport::tparse;

namespace {

struct criterion {
	const char* label;
	bool ok = false;
	~criterion() { std::printf("[acceptance] %-38s %s\n", label, ok ? "PASS" : "FAIL"); }
};

global_env install(global_env env, const derived_def& d) {
	for (const auto& f : d.forced)
		if (!env.find_inductive(f.iname)) env.add_inductive(f);
	if (const auto* def = std::get_if<definition>(&d.payload))
		env.add_definition(d.dname, *def);
	else
		env.add_inductive(std::get<inductive_decl>(d.payload));
	return env;
}

std::vector<term> corpus_value_targets(bool with_depth_indices) {
	term b = mk_ind("bool");
	std::vector<term> out = {mk_ind("bool"), mk_ind("nat"), mk_app(mk_ind("option"), b),
	                         mk_apps(mk_ind("sum"), {b, b}), mk_app(mk_ind("list"), b),
	                         mk_app(mk_ind("rose"), b)};
	if (with_depth_indices) {
		for (std::size_t k = 0; k <= 2; ++k) out.push_back(mk_apps(mk_ind("vec"), {b, mk_nat(k)}));
		for (std::size_t k = 0; k <= 1; ++k) out.push_back(mk_apps(mk_ind("brtree"), {b, mk_nat(k)}));
	}
	return out;
}

} // namespace

TEST_CASE("1. golden: generalized constructor for Node") {
	criterion c{"1 genctor Node_eqs golden"};
	global_env env = corpus_env();
	derived_def d = derive_generalized_constructor(env, {"Node", "Node_eqs"});
	const auto& def = std::get<definition>(d.payload);
	REQUIRE(alpha_eq(def.ty,
	                 tparse(env, "forall (A : Type) (n : nat) (l : list (brtree A n)) (x : nat), "
	                             "x = S n -> brtree A x")));
	REQUIRE(d.checked);
	check(env, {}, def.body, def.ty); // the generated body kernel-checks at that type
	c.ok = true;
}

TEST_CASE("2. golden: nested induction for brtree") {
	criterion c{"2 brtree_ind_MC golden"};
	global_env env = corpus_env();
	derived_def d = derive_induction(env, {"brtree", true, ""});
	global_env env2 = install(env, d);
	const auto& def = std::get<definition>(d.payload);
	REQUIRE(alpha_eq(def.ty,
	                 tparse(env2,
	                        "forall (p : forall (A : Type) (n : nat), brtree A n -> Type), "
	                        "(forall (A : Type) (a : A), p A 0 (Leaf A a)) -> "
	                        "(forall (A : Type) (n : nat) (l : list (brtree A n)), "
	                        "is_list (brtree A n) (p A n) l -> p A (S n) (Node A n l)) -> "
	                        "forall (A : Type) (n : nat) (t : brtree A n), p A n t")));
	const inductive_decl* is_list = env2.find_inductive("is_list");
	REQUIRE(is_list);
	REQUIRE(is_list->ctors.size() == 2);
	REQUIRE(is_list->ctors[0].cname == "is_nil");
	REQUIRE(is_list->ctors[1].cname == "is_cons");
	check(env2, {}, def.body, def.ty);
	guard_check(env2, def.body);
	c.ok = true;
}

TEST_CASE("3. golden: subterm relation for list, byte-identical") {
	criterion c{"3 list_direct_subterm byte golden"};
	session_config cfg;
	auto res = run_program_text("Derive Subterm for list.\n", cfg, "golden.ind");
	REQUIRE(res.exit_code == exit_ok);
	std::ifstream f(std::string(DERIVEKIT_TEST_DIR) + "/golden/list_subterm_pretty.txt",
	                std::ios::binary);
	REQUIRE(f.good());
	std::stringstream ss;
	ss << f.rdbuf();
	REQUIRE(res.output == ss.str());
	c.ok = true;
}

TEST_CASE("4. non-nested mode omits the is_list hypothesis") {
	criterion c{"4 no-nested brtree principle"};
	global_env env = corpus_env();
	derived_def d = derive_induction(env, {"brtree", false, "brtree_rect_like"});
	REQUIRE(d.forced.empty());
	const auto& def = std::get<definition>(d.payload);
	REQUIRE(alpha_eq(def.ty,
	                 tparse(env,
	                        "forall (p : forall (A : Type) (n : nat), brtree A n -> Type), "
	                        "(forall (A : Type) (a : A), p A 0 (Leaf A a)) -> "
	                        "(forall (A : Type) (n : nat) (l : list (brtree A n)), "
	                        "p A (S n) (Node A n l)) -> "
	                        "forall (A : Type) (n : nat) (t : brtree A n), p A n t")));
	REQUIRE(d.checked);
	c.ok = true;
}

TEST_CASE("5. corpus well-typedness across all three plugins") {
	criterion c{"5 corpus derivations all check"};
	global_env env = corpus_env();
	std::size_t derivations = 0;
	for (const auto& nm : testsupport::corpus_inductives()) {
		const inductive_decl& d = *env.find_inductive(nm);
		for (std::size_t j = 0; j < d.ctors.size(); ++j) {
			derived_def g =
			    derive_generalized_constructor(env, {d.ctors[j].cname, d.ctors[j].cname + "_eqs"});
			REQUIRE(g.checked);
			++derivations;
		}
		for (bool nested : {true, false}) {
			derived_def s = derive_induction(env, {nm, nested, nm + (nested ? "_iMC" : "_rMC")});
			REQUIRE(s.checked);
			++derivations;
		}
		derived_def st = derive_subterm(env, nm);
		REQUIRE(st.checked);
		++derivations;
	}
	REQUIRE(derivations >= 8 * 3);
	c.ok = true;
}

TEST_CASE("6. computation law: leaf count of the 4-leaf tree") {
	criterion c{"6 brtree scheme counts 4 leaves"};
	session_config cfg;
	global_env env = prelude_env();
	std::string src = R"(
Inductive brtree (A : Type) : nat -> Type :=
| Leaf (a : A) : brtree A 0
| Node (n : nat) (l : list (brtree A n)) : brtree A (S n).

Scheme Induction for brtree.

Definition cnt_motive := fun (A : Type) (n : nat) (t : brtree A n) => nat.

Definition sum_leaves := fix SW {struct 3} : forall (A : Type) (n : nat) (l : list (brtree A n)),
    is_list (brtree A n) (cnt_motive A n) l -> nat :=
  fun (A : Type) (n : nat) (l : list (brtree A n)) (w : is_list (brtree A n) (cnt_motive A n) l) =>
    match w in is_list
    return (fun (l' : list (brtree A n)) (w' : is_list (brtree A n) (cnt_motive A n) l') => nat)
    with
    | is_nil => 0
    | is_cons => fun (x : brtree A n) (px : cnt_motive A n x) (xs : list (brtree A n))
                     (pxs : is_list (brtree A n) (cnt_motive A n) xs) => plus px (SW A n xs pxs)
    end.

Definition count_leaves := fun (A : Type) (n : nat) (t : brtree A n) =>
  brtree_ind_MC cnt_motive
    (fun (A' : Type) (a : A') => 1)
    (fun (A' : Type) (n' : nat) (l : list (brtree A' n'))
         (w : is_list (brtree A' n') (cnt_motive A' n') l) => sum_leaves A' n' l w)
    A n t.
)";
	auto res = run_program_text(src, cfg, "count.ind", &env);
	REQUIRE(res.exit_code == exit_ok);

	term tree = tparse(env,
	                   "Node bool 1 (Node bool 0 (Leaf bool true :: Leaf bool false :: nil (brtree bool 0)) "
	                   ":: Node bool 0 (Leaf bool true :: Leaf bool true :: nil (brtree bool 0)) "
	                   ":: nil (brtree bool 1))");
	check(env, {}, tree, tparse(env, "brtree bool 2"));

	// brute-force oracle outside the kernel
	std::function<std::size_t(const term&)> leaves = [&](const term& t) -> std::size_t {
		auto [h, args] = decompose_app(t);
		if (const auto* k = h.as_construct(); k && k->ind == "brtree" && k->idx == 0) return 1;
		std::size_t total = 0;
		for (const auto& a : args) total += leaves(a);
		return total;
	};
	REQUIRE(leaves(tree) == 4);
	term result = normalize(env, {}, mk_apps(mk_const("count_leaves"),
	                                         {mk_ind("bool"), mk_nat(2), tree}));
	REQUIRE(alpha_eq(result, mk_nat(4)));
	c.ok = true;
}

TEST_CASE("7. round-trip law for generalized constructors") {
	criterion c{"7 genctor reflexivity round-trip"};
	global_env env = corpus_env();
	std::map<std::string, std::set<std::size_t>> seen;

	for (const auto& ty : corpus_value_targets(true)) {
		for (const auto& t : enumerate_closed_terms(env, ty, 2)) {
			auto [h, args] = decompose_app(t);
			const t_construct& con = *h.as_construct();
			const inductive_decl& ind = *env.find_inductive(con.ind);
			seen[con.ind].insert(con.idx);

			global_env env2 = env;
			derived_def dd = derive_generalized_constructor(
			    env2, {ind.ctors[con.idx].cname, ind.ctors[con.idx].cname + "_eqs"});
			env2.add_definition(dd.dname, std::get<definition>(dd.payload));

			term tty = whnf(env2, {}, infer(env2, {}, t));
			auto [th, targs] = decompose_app(tty);
			(void)th;
			std::vector<term> ixs(targs.begin() + static_cast<long>(ind.params.size()), targs.end());
			std::vector<term> gapp_args = args;
			for (std::size_t s = ixs.size(); s-- > 0;) {
				term v = normalize(env2, {}, ixs[s]);
				gapp_args.push_back(v);
				gapp_args.push_back(mk_apps(mk_construct("eq", 0), {infer(env2, {}, v), v}));
			}
			term gapp = mk_apps(mk_const(dd.dname), gapp_args);
			check(env2, {}, gapp, tty);
			REQUIRE(alpha_eq(normalize(env2, {}, gapp), normalize(env2, {}, t)));
		}
	}
	// every corpus constructor was exercised at some closed instance
	for (const auto& nm : testsupport::corpus_inductives())
		REQUIRE(seen[nm].size() == env.find_inductive(nm)->ctors.size());
	c.ok = true;
}

TEST_CASE("8. acyclicity of the subterm closure at desk scale") {
	criterion c{"8 subterm closure acyclic"};
	global_env env = corpus_env();

	auto brute_force = [&](const std::vector<term>& universe) {
		std::vector<std::pair<term, term>> out;
		for (const auto& t : universe) {
			auto [h, args] = decompose_app(t);
			const auto* k = h.as_construct();
			if (!k) continue;
			const inductive_decl& d = *env.find_inductive(k->ind);
			for (std::size_t i = d.params.size(); i < args.size(); ++i) {
				term ty = whnf(env, {}, infer(env, {}, args[i]));
				auto [th, targs] = decompose_app(ty);
				if (th.as_ind() && th.as_ind()->ind == k->ind) out.push_back({args[i], t});
			}
		}
		return out;
	};
	auto same_set = [](const std::vector<std::pair<term, term>>& a,
	                   const std::vector<std::pair<term, term>>& b) {
		auto has = [](const std::vector<std::pair<term, term>>& v, const term& x, const term& y) {
			for (const auto& [s, t] : v)
				if (alpha_eq(s, x) && alpha_eq(t, y)) return true;
			return false;
		};
		for (const auto& [x, y] : a)
			if (!has(b, x, y)) return false;
		for (const auto& [x, y] : b)
			if (!has(a, x, y)) return false;
		return true;
	};

	std::vector<std::pair<std::string, std::vector<term>>> targets;
	targets.push_back({"nat", enumerate_closed_terms(env, mk_ind("nat"), 4)});
	targets.push_back({"list", enumerate_closed_terms(env, mk_app(mk_ind("list"), mk_ind("bool")), 3)});
	{
		std::vector<term> vecs;
		for (std::size_t k = 0; k <= 3; ++k) {
			auto part =
			    enumerate_closed_terms(env, mk_apps(mk_ind("vec"), {mk_ind("bool"), mk_nat(k)}), 3);
			vecs.insert(vecs.end(), part.begin(), part.end());
		}
		targets.push_back({"vec", vecs});
	}
	for (const auto& [nm, universe] : targets) {
		REQUIRE(!universe.empty());
		derived_def rel = derive_subterm(env, nm);
		auto direct = direct_subterm_pairs(env, rel, universe);
		REQUIRE(same_set(direct, brute_force(universe)));
		auto closure = transitive_closure(env, rel, direct);
		for (const auto& [a, b] : closure) REQUIRE(!alpha_eq(a, b));
		REQUIRE(transitive_closure_step(env, rel, closure).size() == closure.size());
	}
	c.ok = true;
}

TEST_CASE("9. term-surgery properties over exhaustive enumeration") {
	criterion c{"9 surgery properties at size <= 5"};
	auto terms = testsupport::enumerate_raw_terms(5);
	REQUIRE(terms.size() > 1000);
	term u = mk_app(mk_rel(0), mk_rel(1));
	for (const auto& t : terms) {
		for (std::size_t k = 0; k <= 2; ++k) {
			REQUIRE(exact_eq(lift(2, k, lift(1, k, t)), lift(3, k, t)));
			REQUIRE(exact_eq(subst(lift(1, k, t), k, u), t));
		}
		auto [h, args] = decompose_app(t);
		REQUIRE(exact_eq(mk_apps(h, args), t));
		auto [tele, head] = decompose_prod(t);
		REQUIRE(exact_eq(compose_prod(tele, head), t));
	}
	c.ok = true;
}

TEST_CASE("10. parser round-trip over corpus and derived definitions") {
	criterion c{"10 parse . pretty alpha-identity"};
	global_env env = corpus_env();

	// every corpus declaration; self-references resolve before the global
	// lookup, so re-parsing against the full env is sound
	for (const auto& nm : testsupport::corpus_inductives()) {
		const inductive_decl& d = *env.find_inductive(nm);
		std::string rendered = render_inductive(env, d, inductive_style::with_params);
		auto cmds = parse_program(rendered);
		REQUIRE(cmds.size() == 1);
		inductive_decl back = resolve_inductive(env, cmds[0].ind);
		REQUIRE(testsupport::decl_alpha_eq(back, d));
		// sexp round-trips exactly
		auto rt = sexp::read_decl(sexp::write_inductive(d));
		REQUIRE(rt.ind.has_value());
		REQUIRE(rt.ind->iname == d.iname);
		for (std::size_t j = 0; j < d.ctors.size(); ++j)
			REQUIRE(exact_eq(rt.ind->ctors[j].ty, d.ctors[j].ty));
	}

	// every derived definition: derive everything, then round-trip each
	global_env full = env;
	std::vector<std::string> derived_names;
	for (const auto& nm : testsupport::corpus_inductives()) {
		const inductive_decl d = *full.find_inductive(nm);
		for (std::size_t j = 0; j < d.ctors.size(); ++j) {
			derived_def g = derive_generalized_constructor(full, {d.ctors[j].cname, d.ctors[j].cname + "_eqs"});
			full = install(full, g);
			derived_names.push_back(g.dname);
		}
		derived_def s = derive_induction(full, {nm, true, ""});
		full = install(full, s);
		derived_names.push_back(s.dname);
		derived_def st = derive_subterm(full, nm);
		full = install(full, st);
		// inductive round-trip for the relation
		const inductive_decl& rel = std::get<inductive_decl>(st.payload);
		std::string rendered = render_inductive(full, rel, inductive_style::full_arity);
		auto cmds = parse_program(rendered);
		inductive_decl back = resolve_inductive(full, [&] {
			s_inductive si = cmds[0].ind;
			si.iname = rel.iname + "_rt"; // avoid the name clash on re-resolution
			return si;
		}());
		REQUIRE(alpha_eq(arity_of(back), arity_of(rel)));
		for (std::size_t j = 0; j < rel.ctors.size(); ++j)
			REQUIRE(alpha_eq(compose_prod(back.params, back.ctors[j].ty),
			                 closed_ctor_type(rel, j)));
		auto rt = sexp::read_decl(sexp::write_inductive(rel));
		REQUIRE(rt.ind.has_value());
		for (std::size_t j = 0; j < rel.ctors.size(); ++j)
			REQUIRE(exact_eq(rt.ind->ctors[j].ty, rel.ctors[j].ty));
	}
	for (const auto& dn : derived_names) {
		const definition& def = *full.find_definition(dn);
		std::string rendered = render_definition(full, dn, def);
		auto cmds = parse_program(rendered);
		REQUIRE(cmds.size() == 1);
		REQUIRE(cmds[0].k == command::kind::define_constant);
		term body = resolve(full, {}, cmds[0].body);
		term ty = resolve(full, {}, cmds[0].ty);
		REQUIRE(alpha_eq(ty, def.ty));
		REQUIRE(alpha_eq(body, def.body));
		// rendering is idempotent across the round-trip
		REQUIRE(render_definition(full, dn, definition{ty, body}) == rendered);
		// sexp round-trips exactly
		auto rt = sexp::read_decl(sexp::write_definition(dn, def));
		REQUIRE(rt.def.has_value());
		REQUIRE(exact_eq(rt.def->ty, def.ty));
		REQUIRE(exact_eq(rt.def->body, def.body));
	}
	c.ok = true;
}
