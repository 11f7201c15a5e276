// Global environment: named inductive declarations and definitions,
// append-only, plus the fixed prelude (eq, nat, bool, list, option, plus).
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "derivekit/term.hpp"

namespace derivekit {

struct definition {
	term ty;
	term body;
};

// Constructor type is scoped in the parameter context; the inductive refers
// to itself by name (t_ind), never by Rel.
struct constructor_decl {
	std::string cname;
	term ty;
};

struct inductive_decl {
	std::string iname;
	context params;
	context indices;
	sort s;
	std::vector<constructor_decl> ctors;
};

// Full arity: forall params, forall indices, sort.
inline term arity_of(const inductive_decl& d) {
	term t = mk_sort(d.s);
	t = compose_prod(d.indices, std::move(t));
	return compose_prod(d.params, std::move(t));
}

// Constructor type with the parameter telescope prepended (closed form).
inline term closed_ctor_type(const inductive_decl& d, std::size_t idx) {
	return compose_prod(d.params, d.ctors.at(idx).ty);
}

// Rels for the binders of a telescope of length n, outermost first,
// as seen from under the whole telescope plus `extra` inner binders.
inline std::vector<term> telescope_rels(std::size_t n, std::size_t extra = 0) {
	std::vector<term> rels;
	rels.reserve(n);
	for (std::size_t i = 0; i < n; ++i) rels.push_back(mk_rel(n - 1 - i + extra));
	return rels;
}

class name_clash_error : public std::runtime_error {
public:
	explicit name_clash_error(const std::string& n)
	    : std::runtime_error("name already defined: " + n), clashing(n) {}
	std::string clashing;
};

class global_env {
public:
	struct entry {
		std::string ename;
		std::variant<inductive_decl, definition> payload;
	};

	bool contains(const std::string& n) const {
		return by_name_.count(n) != 0 || ctor_index_.count(n) != 0;
	}

	const inductive_decl* find_inductive(const std::string& n) const {
		auto it = by_name_.find(n);
		if (it == by_name_.end()) return nullptr;
		return std::get_if<inductive_decl>(&entries_[it->second].payload);
	}

	const definition* find_definition(const std::string& n) const {
		auto it = by_name_.find(n);
		if (it == by_name_.end()) return nullptr;
		return std::get_if<definition>(&entries_[it->second].payload);
	}

	// Constructor name -> (inductive name, constructor index).
	const std::pair<std::string, std::size_t>* find_constructor(const std::string& n) const {
		auto it = ctor_index_.find(n);
		return it == ctor_index_.end() ? nullptr : &it->second;
	}

	void add_inductive(inductive_decl d) {
		if (contains(d.iname)) throw name_clash_error(d.iname);
		for (const auto& c : d.ctors)
			if (contains(c.cname)) throw name_clash_error(c.cname);
		by_name_[d.iname] = entries_.size();
		for (std::size_t i = 0; i < d.ctors.size(); ++i)
			ctor_index_[d.ctors[i].cname] = {d.iname, i};
		entries_.push_back(entry{d.iname, std::move(d)});
	}

	void add_definition(const std::string& n, definition d) {
		if (contains(n)) throw name_clash_error(n);
		by_name_[n] = entries_.size();
		entries_.push_back(entry{n, std::move(d)});
	}

	const std::vector<entry>& entries() const { return entries_; }

private:
	std::vector<entry> entries_;
	std::map<std::string, std::size_t> by_name_;
	std::map<std::string, std::pair<std::string, std::size_t>> ctor_index_;
};

// The fixed prelude every session starts from.
inline global_env prelude_env() {
	global_env env;
	const term type0 = mk_type(0);
	auto nm = [](const char* s) { return name::of(s); };

	{
		inductive_decl nat;
		nat.iname = "nat";
		nat.s = sort::type(0);
		nat.ctors.push_back({"O", mk_ind("nat")});
		nat.ctors.push_back({"S", mk_prod(nm("n"), mk_ind("nat"), mk_ind("nat"))});
		env.add_inductive(std::move(nat));
	}
	{
		inductive_decl b;
		b.iname = "bool";
		b.s = sort::type(0);
		b.ctors.push_back({"true", mk_ind("bool")});
		b.ctors.push_back({"false", mk_ind("bool")});
		env.add_inductive(std::move(b));
	}
	{
		// eq (A : Type) (x : A) : A -> Prop := eq_refl : eq A x x
		inductive_decl eq;
		eq.iname = "eq";
		eq.params = {local_decl{nm("A"), type0, std::nullopt},
		             local_decl{nm("x"), mk_rel(0), std::nullopt}};
		eq.indices = {local_decl{nm("y"), mk_rel(1), std::nullopt}};
		eq.s = sort::prop();
		eq.ctors.push_back({"eq_refl", mk_apps(mk_ind("eq"), {mk_rel(1), mk_rel(0), mk_rel(0)})});
		env.add_inductive(std::move(eq));
	}
	{
		inductive_decl list;
		list.iname = "list";
		list.params = {local_decl{nm("A"), type0, std::nullopt}};
		list.s = sort::type(0);
		list.ctors.push_back({"nil", mk_app(mk_ind("list"), mk_rel(0))});
		list.ctors.push_back(
		    {"cons", mk_prod(nm("a"), mk_rel(0),
		                     mk_prod(nm("l"), mk_app(mk_ind("list"), mk_rel(1)),
		                             mk_app(mk_ind("list"), mk_rel(2))))});
		env.add_inductive(std::move(list));
	}
	{
		inductive_decl opt;
		opt.iname = "option";
		opt.params = {local_decl{nm("A"), type0, std::nullopt}};
		opt.s = sort::type(0);
		opt.ctors.push_back({"None", mk_app(mk_ind("option"), mk_rel(0))});
		opt.ctors.push_back(
		    {"Some", mk_prod(nm("a"), mk_rel(0), mk_app(mk_ind("option"), mk_rel(1)))});
		env.add_inductive(std::move(opt));
	}
	{
		// plus : nat -> nat -> nat, structural on the first argument
		const term nat = mk_ind("nat");
		const term plus_ty = mk_impl(nat, mk_impl(nat, nat));
		// under [plus, m, n]: m = Rel 1, n = Rel 0
		const term s_branch =
		    mk_lam(nm("k"), nat,
		           mk_app(mk_construct("nat", 1), mk_apps(mk_rel(3), {mk_rel(0), mk_rel(1)})));
		const term body =
		    mk_lam(nm("m"), nat,
		           mk_lam(nm("n"), nat,
		                  mk_case("nat", mk_lam(nm("m'"), nat, nat), mk_rel(1),
		                          {mk_rel(0), s_branch})));
		env.add_definition("plus", definition{plus_ty, mk_fix(nm("plus"), 0, plus_ty, body)});
	}
	return env;
}

// Closed unary numeral.
inline term mk_nat(std::size_t n) {
	term t = mk_construct("nat", 0);
	for (std::size_t i = 0; i < n; ++i) t = mk_app(mk_construct("nat", 1), t);
	return t;
}

// Inverse of mk_nat where possible.
inline std::optional<std::size_t> as_nat(term t) {
	std::size_t n = 0;
	for (;;) {
		if (const auto* c = t.as_construct()) {
			if (c->ind == "nat" && c->idx == 0) return n;
			return std::nullopt;
		}
		const auto* a = t.as_app();
		if (!a) return std::nullopt;
		const auto* c = a->fn.as_construct();
		if (!c || c->ind != "nat" || c->idx != 1) return std::nullopt;
		++n;
		t = a->arg;
	}
}

} // namespace derivekit
