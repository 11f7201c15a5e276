// Kernel term language: de Bruijn syntax, binding-aware term surgery,
// local contexts.
#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace derivekit {

template <class... Fs> struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs> overloaded(Fs...) -> overloaded<Fs...>;

inline bool valid_identifier(const std::string& s) {
	if (s.empty()) return false;
	auto head = [](char c) { return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
	auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '\''; };
	if (!head(s[0])) return false;
	for (std::size_t i = 1; i < s.size(); ++i)
		if (!tail(s[i])) return false;
	return true;
}

// Binder name. Anonymous binders carry no identifier.
class name {
public:
	name() = default;
	static name anon() { return name{}; }
	static name of(std::string id) {
		if (!valid_identifier(id)) throw std::invalid_argument("invalid identifier: " + id);
		name n;
		n.id_ = std::move(id);
		return n;
	}
	bool is_anon() const { return !id_.has_value(); }
	const std::string& id() const { return *id_; }
	bool operator==(const name& other) const { return id_ == other.id_; }

private:
	std::optional<std::string> id_;
};

// Prop, or Type at a fixed universe level. Type(i) : Type(i+1), Prop : Type(0).
class sort {
public:
	sort() : sort(true, 0) {} // defaults to Prop
	static sort prop() { return sort{true, 0}; }
	static sort type(unsigned level) { return sort{false, level}; }
	bool is_prop() const { return prop_; }
	unsigned level() const { return level_; }
	bool operator==(const sort& other) const {
		return prop_ == other.prop_ && (prop_ || level_ == other.level_);
	}
	// cumulativity: Prop <= Type(i), Type(i) <= Type(j) iff i <= j
	bool le(const sort& other) const {
		if (prop_) return true;
		return !other.prop_ && level_ <= other.level_;
	}

private:
	sort(bool p, unsigned l) : prop_(p), level_(l) {}
	bool prop_;
	unsigned level_;
};

struct term_node;

// Immutable shared term handle. All operations below are pure.
class term {
public:
	explicit term(term_node n);
	const term_node& node() const;

	template <class V> decltype(auto) visit(V&& v) const;

	const struct t_sort* as_sort() const;
	const struct t_rel* as_rel() const;
	const struct t_prod* as_prod() const;
	const struct t_lam* as_lam() const;
	const struct t_let* as_let() const;
	const struct t_app* as_app() const;
	const struct t_ind* as_ind() const;
	const struct t_construct* as_construct() const;
	const struct t_case* as_case() const;
	const struct t_fix* as_fix() const;
	const struct t_const* as_const() const;

private:
	std::shared_ptr<const term_node> p_;
};

struct t_sort { sort s; };
struct t_rel { std::size_t index; };                       // 0-based, innermost binder
struct t_prod { name na; term dom; term cod; };
struct t_lam { name na; term dom; term body; };
struct t_let { name na; term val; term ty; term body; };
struct t_app { term fn; term arg; };                       // binary, curried
struct t_ind { std::string ind; };
struct t_construct { std::string ind; std::size_t idx; };  // idx in declaration order
struct t_case { std::string ind; term motive; term scrutinee; std::vector<term> branches; };
struct t_fix { name na; std::size_t struct_arg; term ty; term body; };
struct t_const { std::string cname; };

struct term_node {
	std::variant<t_sort, t_rel, t_prod, t_lam, t_let, t_app, t_ind, t_construct, t_case,
	             t_fix, t_const> v;
};

inline term::term(term_node n) : p_(std::make_shared<const term_node>(std::move(n))) {}
inline const term_node& term::node() const { return *p_; }
template <class V> decltype(auto) term::visit(V&& v) const {
	return std::visit(std::forward<V>(v), p_->v);
}
inline const t_sort* term::as_sort() const { return std::get_if<t_sort>(&p_->v); }
inline const t_rel* term::as_rel() const { return std::get_if<t_rel>(&p_->v); }
inline const t_prod* term::as_prod() const { return std::get_if<t_prod>(&p_->v); }
inline const t_lam* term::as_lam() const { return std::get_if<t_lam>(&p_->v); }
inline const t_let* term::as_let() const { return std::get_if<t_let>(&p_->v); }
inline const t_app* term::as_app() const { return std::get_if<t_app>(&p_->v); }
inline const t_ind* term::as_ind() const { return std::get_if<t_ind>(&p_->v); }
inline const t_construct* term::as_construct() const { return std::get_if<t_construct>(&p_->v); }
inline const t_case* term::as_case() const { return std::get_if<t_case>(&p_->v); }
inline const t_fix* term::as_fix() const { return std::get_if<t_fix>(&p_->v); }
inline const t_const* term::as_const() const { return std::get_if<t_const>(&p_->v); }

inline term mk_sort(sort s) { return term{term_node{t_sort{s}}}; }
inline term mk_prop() { return mk_sort(sort::prop()); }
inline term mk_type(unsigned level) { return mk_sort(sort::type(level)); }
inline term mk_rel(std::size_t i) { return term{term_node{t_rel{i}}}; }
inline term mk_prod(name na, term dom, term cod) {
	return term{term_node{t_prod{std::move(na), std::move(dom), std::move(cod)}}};
}
inline term mk_lam(name na, term dom, term body) {
	return term{term_node{t_lam{std::move(na), std::move(dom), std::move(body)}}};
}
inline term mk_let(name na, term val, term ty, term body) {
	return term{term_node{t_let{std::move(na), std::move(val), std::move(ty), std::move(body)}}};
}
inline term mk_app(term fn, term arg) { return term{term_node{t_app{std::move(fn), std::move(arg)}}}; }
inline term mk_ind(std::string ind) { return term{term_node{t_ind{std::move(ind)}}}; }
inline term mk_construct(std::string ind, std::size_t idx) {
	return term{term_node{t_construct{std::move(ind), idx}}};
}
inline term mk_case(std::string ind, term motive, term scrutinee, std::vector<term> branches) {
	return term{term_node{
	    t_case{std::move(ind), std::move(motive), std::move(scrutinee), std::move(branches)}}};
}
inline term mk_fix(name na, std::size_t struct_arg, term ty, term body) {
	return term{term_node{t_fix{std::move(na), struct_arg, std::move(ty), std::move(body)}}};
}
inline term mk_const(std::string cname) { return term{term_node{t_const{std::move(cname)}}}; }

// Left-nested application spine; mk_apps(f, {}) = f.
inline term mk_apps(term fn, const std::vector<term>& args) {
	term acc = std::move(fn);
	for (const auto& a : args) acc = mk_app(acc, a);
	return acc;
}

// Local declaration; `body` present for let-bound entries.
struct local_decl {
	name na;
	term ty;
	std::optional<term> body;
};

// Ordered telescope, innermost declaration last.
using context = std::vector<local_decl>;

inline context ctx_push(context ctx, local_decl d) {
	ctx.push_back(std::move(d));
	return ctx;
}

// Every Rel(i) with i >= k (counting binders crossed) becomes Rel(i + n).
inline term lift(std::size_t n, std::size_t k, const term& t) {
	if (n == 0) return t;
	return t.visit(overloaded{
	    [&](const t_sort&) { return t; },
	    [&](const t_rel& r) { return r.index >= k ? mk_rel(r.index + n) : t; },
	    [&](const t_prod& p) { return mk_prod(p.na, lift(n, k, p.dom), lift(n, k + 1, p.cod)); },
	    [&](const t_lam& l) { return mk_lam(l.na, lift(n, k, l.dom), lift(n, k + 1, l.body)); },
	    [&](const t_let& l) {
		    return mk_let(l.na, lift(n, k, l.val), lift(n, k, l.ty), lift(n, k + 1, l.body));
	    },
	    [&](const t_app& a) { return mk_app(lift(n, k, a.fn), lift(n, k, a.arg)); },
	    [&](const t_ind&) { return t; },
	    [&](const t_construct&) { return t; },
	    [&](const t_case& c) {
		    std::vector<term> brs;
		    brs.reserve(c.branches.size());
		    for (const auto& b : c.branches) brs.push_back(lift(n, k, b));
		    return mk_case(c.ind, lift(n, k, c.motive), lift(n, k, c.scrutinee), std::move(brs));
	    },
	    [&](const t_fix& f) { return mk_fix(f.na, f.struct_arg, lift(n, k, f.ty), lift(n, k + 1, f.body)); },
	    [&](const t_const&) { return t; }});
}

// Capture-avoiding substitution of u for Rel(k); indices above k decrement.
inline term subst(const term& t, std::size_t k, const term& u) {
	return t.visit(overloaded{
	    [&](const t_sort&) { return t; },
	    [&](const t_rel& r) {
		    if (r.index < k) return t;
		    if (r.index == k) return lift(k, 0, u);
		    return mk_rel(r.index - 1);
	    },
	    [&](const t_prod& p) { return mk_prod(p.na, subst(p.dom, k, u), subst(p.cod, k + 1, u)); },
	    [&](const t_lam& l) { return mk_lam(l.na, subst(l.dom, k, u), subst(l.body, k + 1, u)); },
	    [&](const t_let& l) {
		    return mk_let(l.na, subst(l.val, k, u), subst(l.ty, k, u), subst(l.body, k + 1, u));
	    },
	    [&](const t_app& a) { return mk_app(subst(a.fn, k, u), subst(a.arg, k, u)); },
	    [&](const t_ind&) { return t; },
	    [&](const t_construct&) { return t; },
	    [&](const t_case& c) {
		    std::vector<term> brs;
		    brs.reserve(c.branches.size());
		    for (const auto& b : c.branches) brs.push_back(subst(b, k, u));
		    return mk_case(c.ind, subst(c.motive, k, u), subst(c.scrutinee, k, u), std::move(brs));
	    },
	    [&](const t_fix& f) { return mk_fix(f.na, f.struct_arg, subst(f.ty, k, u), subst(f.body, k + 1, u)); },
	    [&](const t_const&) { return t; }});
}

// Substitute the innermost |us| binders at once; us innermost-first, each
// scoped in the context outside all |us| binders.
inline term subst_many(term t, const std::vector<term>& us) {
	for (std::size_t i = 0; i < us.size(); ++i)
		t = subst(t, 0, lift(us.size() - 1 - i, 0, us[i]));
	return t;
}

// Non-dependent arrow a -> b.
inline term mk_impl(const term& a, const term& b) { return mk_prod(name::anon(), a, lift(1, 0, b)); }

// Inverse of mk_apps: t = mk_apps(head, args) with head not an App.
inline std::pair<term, std::vector<term>> decompose_app(term t) {
	std::vector<term> args;
	while (const auto* a = t.as_app()) {
		args.push_back(a->arg);
		t = a->fn;
	}
	std::reverse(args.begin(), args.end());
	return {std::move(t), std::move(args)};
}

// Peels the product telescope; head is not a Prod.
inline std::pair<context, term> decompose_prod(term t) {
	context tele;
	while (const auto* p = t.as_prod()) {
		tele.push_back(local_decl{p->na, p->dom, std::nullopt});
		t = p->cod;
	}
	return {std::move(tele), std::move(t)};
}

// Re-nests a telescope around a head; inverse of decompose_prod.
inline term compose_prod(const context& tele, term head) {
	for (auto it = tele.rbegin(); it != tele.rend(); ++it)
		head = mk_prod(it->na, it->ty, std::move(head));
	return head;
}

inline term compose_lam(const context& tele, term body) {
	for (auto it = tele.rbegin(); it != tele.rend(); ++it)
		body = mk_lam(it->na, it->ty, std::move(body));
	return body;
}

namespace detail {

inline bool term_eq(const term& a, const term& b, bool compare_names) {
	if (&a.node() == &b.node()) return true;
	if (a.node().v.index() != b.node().v.index()) return false;
	auto names_ok = [&](const name& x, const name& y) { return !compare_names || x == y; };
	return a.visit(overloaded{
	    [&](const t_sort& x) { return x.s == b.as_sort()->s; },
	    [&](const t_rel& x) { return x.index == b.as_rel()->index; },
	    [&](const t_prod& x) {
		    const auto& y = *b.as_prod();
		    return names_ok(x.na, y.na) && term_eq(x.dom, y.dom, compare_names) &&
		           term_eq(x.cod, y.cod, compare_names);
	    },
	    [&](const t_lam& x) {
		    const auto& y = *b.as_lam();
		    return names_ok(x.na, y.na) && term_eq(x.dom, y.dom, compare_names) &&
		           term_eq(x.body, y.body, compare_names);
	    },
	    [&](const t_let& x) {
		    const auto& y = *b.as_let();
		    return names_ok(x.na, y.na) && term_eq(x.val, y.val, compare_names) &&
		           term_eq(x.ty, y.ty, compare_names) && term_eq(x.body, y.body, compare_names);
	    },
	    [&](const t_app& x) {
		    const auto& y = *b.as_app();
		    return term_eq(x.fn, y.fn, compare_names) && term_eq(x.arg, y.arg, compare_names);
	    },
	    [&](const t_ind& x) { return x.ind == b.as_ind()->ind; },
	    [&](const t_construct& x) {
		    const auto& y = *b.as_construct();
		    return x.ind == y.ind && x.idx == y.idx;
	    },
	    [&](const t_case& x) {
		    const auto& y = *b.as_case();
		    if (x.ind != y.ind || x.branches.size() != y.branches.size()) return false;
		    if (!term_eq(x.motive, y.motive, compare_names)) return false;
		    if (!term_eq(x.scrutinee, y.scrutinee, compare_names)) return false;
		    for (std::size_t i = 0; i < x.branches.size(); ++i)
			    if (!term_eq(x.branches[i], y.branches[i], compare_names)) return false;
		    return true;
	    },
	    [&](const t_fix& x) {
		    const auto& y = *b.as_fix();
		    return names_ok(x.na, y.na) && x.struct_arg == y.struct_arg &&
		           term_eq(x.ty, y.ty, compare_names) && term_eq(x.body, y.body, compare_names);
	    },
	    [&](const t_const& x) { return x.cname == b.as_const()->cname; }});
}

} // namespace detail

// Structural equality up to binder names.
inline bool alpha_eq(const term& a, const term& b) { return detail::term_eq(a, b, false); }

// Structural equality including binder names.
inline bool exact_eq(const term& a, const term& b) { return detail::term_eq(a, b, true); }

// True iff no Rel escapes `depth` enclosing binders.
inline bool well_scoped(const term& t, std::size_t depth) {
	return t.visit(overloaded{
	    [&](const t_sort&) { return true; },
	    [&](const t_rel& r) { return r.index < depth; },
	    [&](const t_prod& p) { return well_scoped(p.dom, depth) && well_scoped(p.cod, depth + 1); },
	    [&](const t_lam& l) { return well_scoped(l.dom, depth) && well_scoped(l.body, depth + 1); },
	    [&](const t_let& l) {
		    return well_scoped(l.val, depth) && well_scoped(l.ty, depth) && well_scoped(l.body, depth + 1);
	    },
	    [&](const t_app& a) { return well_scoped(a.fn, depth) && well_scoped(a.arg, depth); },
	    [&](const t_ind&) { return true; },
	    [&](const t_construct&) { return true; },
	    [&](const t_case& c) {
		    if (!well_scoped(c.motive, depth) || !well_scoped(c.scrutinee, depth)) return false;
		    for (const auto& b : c.branches)
			    if (!well_scoped(b, depth)) return false;
		    return true;
	    },
	    [&](const t_fix& f) { return well_scoped(f.ty, depth) && well_scoped(f.body, depth + 1); },
	    [&](const t_const&) { return true; }});
}

// Does Rel(k) occur free in t?
inline bool occurs_rel(const term& t, std::size_t k) {
	return t.visit(overloaded{
	    [&](const t_sort&) { return false; },
	    [&](const t_rel& r) { return r.index == k; },
	    [&](const t_prod& p) { return occurs_rel(p.dom, k) || occurs_rel(p.cod, k + 1); },
	    [&](const t_lam& l) { return occurs_rel(l.dom, k) || occurs_rel(l.body, k + 1); },
	    [&](const t_let& l) {
		    return occurs_rel(l.val, k) || occurs_rel(l.ty, k) || occurs_rel(l.body, k + 1);
	    },
	    [&](const t_app& a) { return occurs_rel(a.fn, k) || occurs_rel(a.arg, k); },
	    [&](const t_ind&) { return false; },
	    [&](const t_construct&) { return false; },
	    [&](const t_case& c) {
		    if (occurs_rel(c.motive, k) || occurs_rel(c.scrutinee, k)) return true;
		    for (const auto& b : c.branches)
			    if (occurs_rel(b, k)) return true;
		    return false;
	    },
	    [&](const t_fix& f) { return occurs_rel(f.ty, k) || occurs_rel(f.body, k + 1); },
	    [&](const t_const&) { return false; }});
}

// Does the inductive `ind` occur anywhere in t?
inline bool occurs_ind(const term& t, const std::string& ind) {
	return t.visit(overloaded{
	    [&](const t_sort&) { return false; },
	    [&](const t_rel&) { return false; },
	    [&](const t_prod& p) { return occurs_ind(p.dom, ind) || occurs_ind(p.cod, ind); },
	    [&](const t_lam& l) { return occurs_ind(l.dom, ind) || occurs_ind(l.body, ind); },
	    [&](const t_let& l) {
		    return occurs_ind(l.val, ind) || occurs_ind(l.ty, ind) || occurs_ind(l.body, ind);
	    },
	    [&](const t_app& a) { return occurs_ind(a.fn, ind) || occurs_ind(a.arg, ind); },
	    [&](const t_ind& i) { return i.ind == ind; },
	    [&](const t_construct& c) { return c.ind == ind; },
	    [&](const t_case& c) {
		    if (c.ind == ind || occurs_ind(c.motive, ind) || occurs_ind(c.scrutinee, ind)) return true;
		    for (const auto& b : c.branches)
			    if (occurs_ind(b, ind)) return true;
		    return false;
	    },
	    [&](const t_fix& f) { return occurs_ind(f.ty, ind) || occurs_ind(f.body, ind); },
	    [&](const t_const&) { return false; }});
}

} // namespace derivekit
