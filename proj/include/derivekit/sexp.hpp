// Stable symbolic-expression serialization of kernel terms and declarations,
// one datum per definition. Tag set:
//   (sort prop) (sort type N) (rel N) (prod NAME DOM COD) (lam NAME DOM BODY)
//   (let NAME VAL TY BODY) (app FN ARG) (ind "I") (construct "I" K)
//   (case "I" MOTIVE SCRUT (branches B...)) (fix NAME K TY BODY) (const "C")
// with NAME either (name "x") or (anon); declarations serialize as
//   (definition "n" TY BODY)
//   (inductive "n" (params DECL...) (indices DECL...) SORT (ctors (ctor "c" TY)...))
// where DECL is (decl NAME TY).
#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "derivekit/env.hpp"
#include "derivekit/term.hpp"

namespace derivekit {

namespace sexp {

inline std::string quote(const std::string& s) { return "\"" + s + "\""; }

inline std::string write_name(const name& n) {
	return n.is_anon() ? "(anon)" : "(name " + quote(n.id()) + ")";
}

inline std::string write_sort(const sort& s) {
	return s.is_prop() ? "(sort prop)" : "(sort type " + std::to_string(s.level()) + ")";
}

inline std::string write(const term& t) {
	return t.visit(overloaded{
	    [&](const t_sort& x) { return write_sort(x.s); },
	    [&](const t_rel& x) { return "(rel " + std::to_string(x.index) + ")"; },
	    [&](const t_prod& x) {
		    return "(prod " + write_name(x.na) + " " + write(x.dom) + " " + write(x.cod) + ")";
	    },
	    [&](const t_lam& x) {
		    return "(lam " + write_name(x.na) + " " + write(x.dom) + " " + write(x.body) + ")";
	    },
	    [&](const t_let& x) {
		    return "(let " + write_name(x.na) + " " + write(x.val) + " " + write(x.ty) + " " +
		           write(x.body) + ")";
	    },
	    [&](const t_app& x) { return "(app " + write(x.fn) + " " + write(x.arg) + ")"; },
	    [&](const t_ind& x) { return "(ind " + quote(x.ind) + ")"; },
	    [&](const t_construct& x) {
		    return "(construct " + quote(x.ind) + " " + std::to_string(x.idx) + ")";
	    },
	    [&](const t_case& x) {
		    std::string out = "(case " + quote(x.ind) + " " + write(x.motive) + " " + write(x.scrutinee) +
		                      " (branches";
		    for (const auto& b : x.branches) out += " " + write(b);
		    return out + "))";
	    },
	    [&](const t_fix& x) {
		    return "(fix " + write_name(x.na) + " " + std::to_string(x.struct_arg) + " " + write(x.ty) +
		           " " + write(x.body) + ")";
	    },
	    [&](const t_const& x) { return "(const " + quote(x.cname) + ")"; }});
}

inline std::string write_context(const char* tag, const context& ctx) {
	std::string out = std::string("(") + tag;
	for (const auto& d : ctx) out += " (decl " + write_name(d.na) + " " + write(d.ty) + ")";
	return out + ")";
}

inline std::string write_definition(const std::string& n, const definition& d) {
	return "(definition " + quote(n) + " " + write(d.ty) + " " + write(d.body) + ")";
}

inline std::string write_inductive(const inductive_decl& d) {
	std::string out = "(inductive " + quote(d.iname) + " " + write_context("params", d.params) + " " +
	                  write_context("indices", d.indices) + " " + write_sort(d.s) + " (ctors";
	for (const auto& c : d.ctors) out += " (ctor " + quote(c.cname) + " " + write(c.ty) + ")";
	return out + "))";
}

// -- reader ------------------------------------------------------------

class read_error : public std::runtime_error {
public:
	explicit read_error(const std::string& m) : std::runtime_error("sexp: " + m) {}
};

namespace detail {

struct node {
	// exactly one of: list, atom, str
	bool is_list = false;
	bool is_str = false;
	std::vector<node> items;
	std::string text;
};

struct reader {
	const std::string& src;
	std::size_t pos = 0;

	void skip_ws() {
		while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
	}
	node parse() {
		skip_ws();
		if (pos >= src.size()) throw read_error("unexpected end of input");
		if (src[pos] == '(') {
			++pos;
			node n;
			n.is_list = true;
			for (;;) {
				skip_ws();
				if (pos >= src.size()) throw read_error("unterminated list");
				if (src[pos] == ')') {
					++pos;
					return n;
				}
				n.items.push_back(parse());
			}
		}
		if (src[pos] == '"') {
			++pos;
			node n;
			n.is_str = true;
			while (pos < src.size() && src[pos] != '"') n.text += src[pos++];
			if (pos >= src.size()) throw read_error("unterminated string");
			++pos;
			return n;
		}
		node n;
		while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) &&
		       src[pos] != '(' && src[pos] != ')')
			n.text += src[pos++];
		if (n.text.empty()) throw read_error("empty atom");
		return n;
	}
};

inline const node& item(const node& n, std::size_t i) {
	if (!n.is_list || i >= n.items.size()) throw read_error("malformed datum");
	return n.items[i];
}

inline std::string atom(const node& n) {
	if (n.is_list || n.is_str) throw read_error("expected atom");
	return n.text;
}

inline std::string str(const node& n) {
	if (!n.is_str) throw read_error("expected string");
	return n.text;
}

inline std::size_t num(const node& n) { return static_cast<std::size_t>(std::stoull(atom(n))); }

inline name read_name(const node& n) {
	std::string tag = atom(item(n, 0));
	if (tag == "anon") return name::anon();
	if (tag == "name") return name::of(str(item(n, 1)));
	throw read_error("expected name");
}

inline sort read_sort(const node& n) {
	if (atom(item(n, 0)) != "sort") throw read_error("expected sort");
	std::string k = atom(item(n, 1));
	if (k == "prop") return sort::prop();
	if (k == "type") return sort::type(static_cast<unsigned>(num(item(n, 2))));
	throw read_error("bad sort");
}

inline term read_term(const node& n) {
	std::string tag = atom(item(n, 0));
	if (tag == "sort") return mk_sort(read_sort(n));
	if (tag == "rel") return mk_rel(num(item(n, 1)));
	if (tag == "prod") return mk_prod(read_name(item(n, 1)), read_term(item(n, 2)), read_term(item(n, 3)));
	if (tag == "lam") return mk_lam(read_name(item(n, 1)), read_term(item(n, 2)), read_term(item(n, 3)));
	if (tag == "let")
		return mk_let(read_name(item(n, 1)), read_term(item(n, 2)), read_term(item(n, 3)),
		              read_term(item(n, 4)));
	if (tag == "app") return mk_app(read_term(item(n, 1)), read_term(item(n, 2)));
	if (tag == "ind") return mk_ind(str(item(n, 1)));
	if (tag == "construct") return mk_construct(str(item(n, 1)), num(item(n, 2)));
	if (tag == "case") {
		const node& brs = item(n, 4);
		if (atom(item(brs, 0)) != "branches") throw read_error("expected branches");
		std::vector<term> branches;
		for (std::size_t i = 1; i < brs.items.size(); ++i) branches.push_back(read_term(brs.items[i]));
		return mk_case(str(item(n, 1)), read_term(item(n, 2)), read_term(item(n, 3)), std::move(branches));
	}
	if (tag == "fix")
		return mk_fix(read_name(item(n, 1)), num(item(n, 2)), read_term(item(n, 3)), read_term(item(n, 4)));
	if (tag == "const") return mk_const(str(item(n, 1)));
	throw read_error("unknown term tag " + tag);
}

inline context read_context(const node& n, const char* tag) {
	if (atom(item(n, 0)) != tag) throw read_error(std::string("expected ") + tag);
	context ctx;
	for (std::size_t i = 1; i < n.items.size(); ++i) {
		const node& d = n.items[i];
		if (atom(item(d, 0)) != "decl") throw read_error("expected decl");
		ctx.push_back(local_decl{read_name(item(d, 1)), read_term(item(d, 2)), std::nullopt});
	}
	return ctx;
}

} // namespace detail

inline term read_term(const std::string& src) {
	detail::reader r{src};
	return detail::read_term(r.parse());
}

// Reads one serialized declaration; returns either a definition or an
// inductive, mirroring the writers above.
struct read_decl_result {
	std::string dname;
	std::optional<definition> def;
	std::optional<inductive_decl> ind;
};

inline read_decl_result read_decl(const std::string& src) {
	detail::reader r{src};
	detail::node n = r.parse();
	std::string tag = detail::atom(detail::item(n, 0));
	read_decl_result out;
	if (tag == "definition") {
		out.dname = detail::str(detail::item(n, 1));
		out.def = definition{detail::read_term(detail::item(n, 2)), detail::read_term(detail::item(n, 3))};
		return out;
	}
	if (tag == "inductive") {
		inductive_decl d;
		d.iname = detail::str(detail::item(n, 1));
		d.params = detail::read_context(detail::item(n, 2), "params");
		d.indices = detail::read_context(detail::item(n, 3), "indices");
		d.s = detail::read_sort(detail::item(n, 4));
		const detail::node& cs = detail::item(n, 5);
		if (detail::atom(detail::item(cs, 0)) != "ctors") throw read_error("expected ctors");
		for (std::size_t i = 1; i < cs.items.size(); ++i) {
			const detail::node& c = cs.items[i];
			if (detail::atom(detail::item(c, 0)) != "ctor") throw read_error("expected ctor");
			d.ctors.push_back(constructor_decl{detail::str(detail::item(c, 1)),
			                                   detail::read_term(detail::item(c, 2))});
		}
		out.dname = d.iname;
		out.ind = std::move(d);
		return out;
	}
	throw read_error("unknown declaration tag " + tag);
}

} // namespace sexp

} // namespace derivekit
