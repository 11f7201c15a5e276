// Coq-like surface syntax: lexer, parser for terms and vernacular commands,
// and scope resolution from named syntax to de Bruijn kernel terms.
//
// Statements end with '.'; comments are (* ... *) and nest. The grammar is
// documented in docs/grammar.ebnf.
#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "derivekit/env.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/term.hpp"

namespace derivekit {

struct source_pos {
	std::size_t line = 1;
	std::size_t col = 1;
};

class parse_error : public std::runtime_error {
public:
	parse_error(source_pos p, const std::string& msg)
	    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg),
	      pos(p), message(msg) {}
	source_pos pos;
	std::string message;
};

class unbound_identifier_error : public std::runtime_error {
public:
	unbound_identifier_error(source_pos p, const std::string& id)
	    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) +
	                         ": unbound identifier " + id),
	      pos(p), ident(id) {}
	source_pos pos;
	std::string ident;
};

// -- tokens -----------------------------------------------------------

namespace detail {

enum class tok {
	ident, number, lparen, rparen, lbrace, rbrace, dot, colon, coloneq, bar, comma,
	darrow, arrow, eq, conscolon, at, underscore, eof,
};

struct token {
	tok kind;
	std::string text;
	std::size_t value = 0;
	source_pos pos;
};

inline const char* tok_name(tok k) {
	switch (k) {
	case tok::ident: return "identifier";
	case tok::number: return "number";
	case tok::lparen: return "'('";
	case tok::rparen: return "')'";
	case tok::lbrace: return "'{'";
	case tok::rbrace: return "'}'";
	case tok::dot: return "'.'";
	case tok::colon: return "':'";
	case tok::coloneq: return "':='";
	case tok::bar: return "'|'";
	case tok::comma: return "','";
	case tok::darrow: return "'=>'";
	case tok::arrow: return "'->'";
	case tok::eq: return "'='";
	case tok::conscolon: return "'::'";
	case tok::at: return "'@'";
	case tok::underscore: return "'_'";
	case tok::eof: return "end of input";
	}
	return "token";
}

inline std::vector<token> lex(const std::string& src) {
	std::vector<token> out;
	source_pos pos;
	std::size_t i = 0;
	auto advance = [&](std::size_t n) {
		for (std::size_t k = 0; k < n; ++k) {
			if (src[i + k] == '\n') {
				++pos.line;
				pos.col = 1;
			} else {
				++pos.col;
			}
		}
		i += n;
	};
	auto head = [](char c) { return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
	auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '\''; };

	while (i < src.size()) {
		char c = src[i];
		if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
			advance(1);
			continue;
		}
		if (c == '(' && i + 1 < src.size() && src[i + 1] == '*') {
			source_pos start = pos;
			advance(2);
			std::size_t depth = 1;
			while (i < src.size() && depth > 0) {
				if (src[i] == '(' && i + 1 < src.size() && src[i + 1] == '*') {
					++depth;
					advance(2);
				} else if (src[i] == '*' && i + 1 < src.size() && src[i + 1] == ')') {
					--depth;
					advance(2);
				} else {
					advance(1);
				}
			}
			if (depth > 0) throw parse_error(start, "unterminated comment");
			continue;
		}
		source_pos p = pos;
		if (head(c)) {
			std::size_t j = i;
			while (j < src.size() && tail(src[j])) ++j;
			std::string text = src.substr(i, j - i);
			advance(j - i);
			if (text == "_")
				out.push_back({tok::underscore, text, 0, p});
			else
				out.push_back({tok::ident, text, 0, p});
			continue;
		}
		if (c >= '0' && c <= '9') {
			std::size_t j = i, v = 0;
			while (j < src.size() && src[j] >= '0' && src[j] <= '9') {
				v = v * 10 + static_cast<std::size_t>(src[j] - '0');
				if (v > 1000000) throw parse_error(p, "numeral too large");
				++j;
			}
			advance(j - i);
			out.push_back({tok::number, "", v, p});
			continue;
		}
		auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
		if (two(':', '=')) { advance(2); out.push_back({tok::coloneq, ":=", 0, p}); continue; }
		if (two(':', ':')) { advance(2); out.push_back({tok::conscolon, "::", 0, p}); continue; }
		if (two('=', '>')) { advance(2); out.push_back({tok::darrow, "=>", 0, p}); continue; }
		if (two('-', '>')) { advance(2); out.push_back({tok::arrow, "->", 0, p}); continue; }
		switch (c) {
		case '(': advance(1); out.push_back({tok::lparen, "(", 0, p}); continue;
		case ')': advance(1); out.push_back({tok::rparen, ")", 0, p}); continue;
		case '{': advance(1); out.push_back({tok::lbrace, "{", 0, p}); continue;
		case '}': advance(1); out.push_back({tok::rbrace, "}", 0, p}); continue;
		case '.': advance(1); out.push_back({tok::dot, ".", 0, p}); continue;
		case ':': advance(1); out.push_back({tok::colon, ":", 0, p}); continue;
		case '|': advance(1); out.push_back({tok::bar, "|", 0, p}); continue;
		case ',': advance(1); out.push_back({tok::comma, ",", 0, p}); continue;
		case '=': advance(1); out.push_back({tok::eq, "=", 0, p}); continue;
		case '@': advance(1); out.push_back({tok::at, "@", 0, p}); continue;
		default: throw parse_error(p, std::string("unexpected character '") + c + "'");
		}
	}
	out.push_back({tok::eof, "", 0, pos});
	return out;
}

inline bool reserved(const std::string& s) {
	static const char* words[] = {"Inductive", "Definition", "Derive", "Scheme", "MetaCoq",
	                              "forall", "fun", "fix", "match", "with", "end", "in",
	                              "return", "let", "struct", "Prop", "Type"};
	for (const char* w : words)
		if (s == w) return true;
	return false;
}

} // namespace detail

// -- surface AST --------------------------------------------------------

struct s_term;
using s_ptr = std::shared_ptr<const s_term>;

struct s_binder {
	name na;
	s_ptr ty; // null only for bare inductive parameters (defaults to Type)
	source_pos pos;
};

struct s_branch {
	std::string ctor;
	s_ptr body;
	source_pos pos;
};

// sub layout: app {fn, arg}; arrow/eq_op/cons_op {lhs, rhs}; prod/lam {body};
// let_in {ty, val, body}; fix {ty, body}; match {scrutinee, motive}
struct s_term {
	enum class kind { ref, srt, num, app, arrow, eq_op, cons_op, prod, lam, let_in, fix, match } k;
	source_pos pos;
	std::string ident;      // ref target; match inductive
	name binder;            // let/fix binder
	sort s = sort::prop();
	std::size_t n = 0;      // numeral value; fix struct index
	std::vector<s_binder> binders;
	std::vector<s_ptr> sub;
	std::vector<s_branch> branches;
};

struct s_constructor {
	std::string cname;
	std::vector<s_binder> args;
	s_ptr result; // null: defaults to the inductive applied to its parameters
	source_pos pos;
};

struct s_inductive {
	std::string iname;
	std::vector<s_binder> params;
	s_ptr arity;
	std::vector<s_constructor> ctors;
};

struct command {
	enum class kind { define_inductive, define_constant, derive_genctor, scheme_induction, derive_subterm };
	kind k;
	source_pos pos;
	s_inductive ind;     // define_inductive
	std::string target;  // constant name / derive target
	std::string as_name; // genctor result name
	s_ptr ty;            // define_constant annotation (may be null)
	s_ptr body;          // define_constant
};

// -- parser -------------------------------------------------------------

namespace detail {

struct parser {
	std::vector<token> toks;
	std::size_t at = 0;

	const token& peek(std::size_t k = 0) const { return toks[std::min(at + k, toks.size() - 1)]; }
	token next() { return toks[at == toks.size() - 1 ? at : at++]; }
	bool look(tok k) const { return peek().kind == k; }
	bool look_ident(const char* s) const { return peek().kind == tok::ident && peek().text == s; }

	token expect(tok k, const char* what) {
		if (!look(k))
			throw parse_error(peek().pos, std::string("expected ") + what + ", got " +
			                                  (peek().kind == tok::ident ? "'" + peek().text + "'"
			                                                             : tok_name(peek().kind)));
		return next();
	}

	std::string expect_name() {
		const token& t = peek();
		if (t.kind != tok::ident || reserved(t.text))
			throw parse_error(t.pos, "expected identifier, got " +
			                             (t.kind == tok::ident ? "'" + t.text + "'" : tok_name(t.kind)));
		return next().text;
	}

	std::string expect_word(const char* w) {
		if (!look_ident(w)) throw parse_error(peek().pos, std::string("expected '") + w + "'");
		return next().text;
	}

	static s_ptr node(s_term t) { return std::make_shared<const s_term>(std::move(t)); }

	// binder_group := '(' (ident | '_')+ ':' term ')'
	void parse_binder_group(std::vector<s_binder>& out) {
		expect(tok::lparen, "'('");
		std::vector<std::pair<name, source_pos>> names;
		for (;;) {
			if (look(tok::underscore)) {
				names.push_back({name::anon(), next().pos});
			} else if (peek().kind == tok::ident && !reserved(peek().text)) {
				source_pos p = peek().pos;
				names.push_back({name::of(next().text), p});
			} else {
				break;
			}
		}
		if (names.empty()) throw parse_error(peek().pos, "expected binder name");
		expect(tok::colon, "':'");
		s_ptr ty = parse_term();
		expect(tok::rparen, "')'");
		for (auto& [na, p] : names) out.push_back(s_binder{na, ty, p});
	}

	std::vector<s_binder> parse_binders() {
		std::vector<s_binder> out;
		while (look(tok::lparen)) parse_binder_group(out);
		if (out.empty()) throw parse_error(peek().pos, "expected binder group");
		return out;
	}

	s_ptr parse_term() {
		const token& t = peek();
		if (look_ident("forall")) {
			next();
			s_term n;
			n.k = s_term::kind::prod;
			n.pos = t.pos;
			n.binders = parse_binders();
			expect(tok::comma, "','");
			n.sub.push_back(parse_term());
			return node(std::move(n));
		}
		if (look_ident("fun")) {
			next();
			s_term n;
			n.k = s_term::kind::lam;
			n.pos = t.pos;
			n.binders = parse_binders();
			expect(tok::darrow, "'=>'");
			n.sub.push_back(parse_term());
			return node(std::move(n));
		}
		if (look_ident("let")) {
			next();
			s_term n;
			n.k = s_term::kind::let_in;
			n.pos = t.pos;
			n.binder = look(tok::underscore) ? (next(), name::anon()) : name::of(expect_name());
			expect(tok::colon, "':'");
			n.sub.push_back(parse_term());
			expect(tok::coloneq, "':='");
			n.sub.push_back(parse_term());
			expect_word("in");
			n.sub.push_back(parse_term());
			return node(std::move(n));
		}
		if (look_ident("fix")) {
			next();
			s_term n;
			n.k = s_term::kind::fix;
			n.pos = t.pos;
			n.binder = name::of(expect_name());
			expect(tok::lbrace, "'{'");
			expect_word("struct");
			n.n = expect(tok::number, "number").value;
			expect(tok::rbrace, "'}'");
			expect(tok::colon, "':'");
			n.sub.push_back(parse_term());
			expect(tok::coloneq, "':='");
			n.sub.push_back(parse_term());
			return node(std::move(n));
		}
		return parse_arrow();
	}

	// match ... end is self-delimiting and participates in application
	s_ptr parse_match() {
		const token& t = peek();
		next();
		s_term n;
		n.k = s_term::kind::match;
		n.pos = t.pos;
		n.sub.push_back(parse_term());
		expect_word("in");
		n.ident = expect_name();
		expect_word("return");
		n.sub.push_back(parse_term());
		expect_word("with");
		if (look(tok::bar)) next();
		while (!look_ident("end")) {
			s_branch br;
			br.pos = peek().pos;
			br.ctor = expect_name();
			expect(tok::darrow, "'=>'");
			br.body = parse_term();
			n.branches.push_back(std::move(br));
			if (look(tok::bar))
				next();
			else
				break;
		}
		expect_word("end");
		return node(std::move(n));
	}

	s_ptr parse_arrow() {
		s_ptr lhs = parse_eq();
		if (look(tok::arrow)) {
			source_pos p = next().pos;
			s_term n;
			n.k = s_term::kind::arrow;
			n.pos = p;
			n.sub = {lhs, parse_term()};
			return node(std::move(n));
		}
		return lhs;
	}

	s_ptr parse_eq() {
		s_ptr lhs = parse_cons();
		if (look(tok::eq)) {
			source_pos p = next().pos;
			s_term n;
			n.k = s_term::kind::eq_op;
			n.pos = p;
			n.sub = {lhs, parse_cons()};
			return node(std::move(n));
		}
		return lhs;
	}

	s_ptr parse_cons() {
		s_ptr lhs = parse_app();
		if (look(tok::conscolon)) {
			source_pos p = next().pos;
			s_term n;
			n.k = s_term::kind::cons_op;
			n.pos = p;
			n.sub = {lhs, parse_cons()};
			return node(std::move(n));
		}
		return lhs;
	}

	bool at_atom() const {
		const token& t = peek();
		if (t.kind == tok::lparen || t.kind == tok::number) return true;
		if (t.kind != tok::ident) return false;
		if (t.text == "Prop" || t.text == "Type" || t.text == "match") return true;
		return !reserved(t.text);
	}

	s_ptr parse_app() {
		if (!at_atom())
			throw parse_error(peek().pos, std::string("expected term, got ") +
			                                  (peek().kind == tok::ident ? "'" + peek().text + "'"
			                                                             : tok_name(peek().kind)));
		s_ptr acc = parse_atom();
		while (at_atom()) {
			s_term n;
			n.k = s_term::kind::app;
			n.pos = peek().pos;
			n.sub = {acc, parse_atom()};
			acc = node(std::move(n));
		}
		return acc;
	}

	s_ptr parse_atom() {
		const token& t = peek();
		if (t.kind == tok::ident && t.text == "match") return parse_match();
		if (t.kind == tok::lparen) {
			next();
			s_ptr inner = parse_term();
			expect(tok::rparen, "')'");
			return inner;
		}
		if (t.kind == tok::number) {
			next();
			s_term n;
			n.k = s_term::kind::num;
			n.pos = t.pos;
			n.n = t.value;
			return node(std::move(n));
		}
		if (t.kind == tok::ident && t.text == "Prop") {
			next();
			s_term n;
			n.k = s_term::kind::srt;
			n.pos = t.pos;
			n.s = sort::prop();
			return node(std::move(n));
		}
		if (t.kind == tok::ident && t.text == "Type") {
			next();
			unsigned level = 0;
			if (look(tok::at)) {
				next();
				expect(tok::lbrace, "'{'");
				level = static_cast<unsigned>(expect(tok::number, "number").value);
				expect(tok::rbrace, "'}'");
			}
			s_term n;
			n.k = s_term::kind::srt;
			n.pos = t.pos;
			n.s = sort::type(level);
			return node(std::move(n));
		}
		if (t.kind == tok::ident && !reserved(t.text)) {
			next();
			s_term n;
			n.k = s_term::kind::ref;
			n.pos = t.pos;
			n.ident = t.text;
			return node(std::move(n));
		}
		throw parse_error(t.pos, std::string("expected term, got ") +
		                             (t.kind == tok::ident ? "'" + t.text + "'" : tok_name(t.kind)));
	}

	// Inductive name params : arity := | c ... | c ... .
	command parse_inductive() {
		command c;
		c.k = command::kind::define_inductive;
		c.pos = peek().pos;
		next(); // Inductive
		c.ind.iname = expect_name();
		while (!look(tok::colon)) {
			if (look(tok::lparen)) {
				parse_binder_group(c.ind.params);
			} else if (peek().kind == tok::ident && !reserved(peek().text)) {
				source_pos p = peek().pos;
				c.ind.params.push_back(s_binder{name::of(next().text), nullptr, p});
			} else {
				throw parse_error(peek().pos, "expected parameter or ':'");
			}
		}
		expect(tok::colon, "':'");
		c.ind.arity = parse_term();
		expect(tok::coloneq, "':='");
		if (look(tok::bar)) next();
		while (!look(tok::dot)) {
			s_constructor ctor;
			ctor.pos = peek().pos;
			ctor.cname = expect_name();
			while (look(tok::lparen)) parse_binder_group(ctor.args);
			if (look(tok::colon)) {
				next();
				ctor.result = parse_term();
			}
			c.ind.ctors.push_back(std::move(ctor));
			if (look(tok::bar))
				next();
			else
				break;
		}
		expect(tok::dot, "'.'");
		return c;
	}

	command parse_command() {
		const token& t = peek();
		if (look_ident("Inductive")) return parse_inductive();
		if (look_ident("Definition")) {
			command c;
			c.k = command::kind::define_constant;
			c.pos = t.pos;
			next();
			c.target = expect_name();
			if (look(tok::colon)) {
				next();
				c.ty = parse_term();
			}
			expect(tok::coloneq, "':='");
			c.body = parse_term();
			expect(tok::dot, "'.'");
			return c;
		}
		if (look_ident("MetaCoq")) {
			next();
			expect_word("Run"); // accepted and ignored
			// falls through to Derive / Scheme
		}
		if (look_ident("Scheme")) {
			command c;
			c.k = command::kind::scheme_induction;
			c.pos = t.pos;
			next();
			expect_word("Induction");
			expect_word("for");
			c.target = expect_name();
			expect(tok::dot, "'.'");
			return c;
		}
		if (look_ident("Derive")) {
			command c;
			c.pos = t.pos;
			next();
			if (look_ident("Generalized")) {
				next();
				expect_word("Constructor");
				expect_word("for");
				c.k = command::kind::derive_genctor;
				c.target = expect_name();
				expect_word("as");
				c.as_name = expect_name();
				expect(tok::dot, "'.'");
				return c;
			}
			// 'Subterm' is matched case-insensitively
			std::string word = expect_name();
			std::string lower;
			for (char ch : word) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
			if (lower != "subterm")
				throw parse_error(t.pos, "expected 'Generalized Constructor' or 'Subterm', got '" + word + "'");
			c.k = command::kind::derive_subterm;
			expect_word("for");
			c.target = expect_name();
			expect(tok::dot, "'.'");
			return c;
		}
		throw parse_error(t.pos, "expected command (Inductive, Definition, Derive, Scheme), got " +
		                             (t.kind == tok::ident ? "'" + t.text + "'" : tok_name(t.kind)));
	}
};

} // namespace detail

// Full-input parse; commands in source order.
inline std::vector<command> parse_program(const std::string& src) {
	detail::parser p{detail::lex(src), 0};
	std::vector<command> out;
	while (!p.look(detail::tok::eof)) out.push_back(p.parse_command());
	return out;
}

// Parses a single term (no trailing input allowed).
inline s_ptr parse_surface_term(const std::string& src) {
	detail::parser p{detail::lex(src), 0};
	s_ptr t = p.parse_term();
	if (!p.look(detail::tok::eof)) throw parse_error(p.peek().pos, "trailing input after term");
	return t;
}

// -- resolution ---------------------------------------------------------

namespace detail {

struct resolver {
	const global_env& env;
	std::vector<std::string> scope; // display names, innermost last; "" unusable
	context kctx;                   // kernel context used to elaborate '=' and '::'
	const std::string* self = nullptr;

	term resolve(const s_ptr& t) {
		switch (t->k) {
		case s_term::kind::ref: {
			for (std::size_t i = 0; i < scope.size(); ++i) {
				std::size_t idx = scope.size() - 1 - i;
				if (!scope[idx].empty() && scope[idx] == t->ident) return mk_rel(i);
			}
			if (self && *self == t->ident) return mk_ind(*self);
			if (env.find_inductive(t->ident)) return mk_ind(t->ident);
			if (const auto* c = env.find_constructor(t->ident)) return mk_construct(c->first, c->second);
			if (env.find_definition(t->ident)) return mk_const(t->ident);
			throw unbound_identifier_error(t->pos, t->ident);
		}
		case s_term::kind::srt:
			return mk_sort(t->s);
		case s_term::kind::num:
			return mk_nat(t->n);
		case s_term::kind::app:
			return mk_app(resolve(t->sub[0]), resolve(t->sub[1]));
		case s_term::kind::arrow: {
			term dom = resolve(t->sub[0]);
			push(name::anon(), dom);
			term cod = resolve(t->sub[1]);
			pop();
			return mk_prod(name::anon(), std::move(dom), std::move(cod));
		}
		case s_term::kind::eq_op: {
			term lhs = resolve(t->sub[0]);
			term ty = infer(env, kctx, lhs);
			term rhs = resolve(t->sub[1]);
			return mk_apps(mk_ind("eq"), {std::move(ty), std::move(lhs), std::move(rhs)});
		}
		case s_term::kind::cons_op: {
			term hd = resolve(t->sub[0]);
			term ty = infer(env, kctx, hd);
			term tl = resolve(t->sub[1]);
			return mk_apps(mk_construct("list", 1), {std::move(ty), std::move(hd), std::move(tl)});
		}
		case s_term::kind::prod:
		case s_term::kind::lam: {
			std::vector<std::pair<name, term>> bound;
			for (const auto& b : t->binders) {
				term ty = resolve(b.ty);
				bound.push_back({b.na, ty});
				push(b.na, ty);
			}
			term body = resolve(t->sub[0]);
			for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
				body = t->k == s_term::kind::prod ? mk_prod(it->first, it->second, std::move(body))
				                                  : mk_lam(it->first, it->second, std::move(body));
				pop();
			}
			return body;
		}
		case s_term::kind::let_in: {
			term ty = resolve(t->sub[0]);
			term val = resolve(t->sub[1]);
			push(t->binder, ty, val);
			term body = resolve(t->sub[2]);
			pop();
			return mk_let(t->binder, std::move(val), std::move(ty), std::move(body));
		}
		case s_term::kind::fix: {
			term ty = resolve(t->sub[0]);
			push(t->binder, ty);
			term body = resolve(t->sub[1]);
			pop();
			return mk_fix(t->binder, t->n, std::move(ty), std::move(body));
		}
		case s_term::kind::match: {
			term scrut = resolve(t->sub[0]);
			const inductive_decl* d = env.find_inductive(t->ident);
			if (!d) throw unbound_identifier_error(t->pos, t->ident);
			term motive = resolve(t->sub[1]);
			if (t->branches.size() != d->ctors.size())
				throw type_error(type_error_kind::ill_formed_case, kctx, scrut,
				                 "match on " + t->ident + " needs one branch per constructor, in order");
			std::vector<term> branches;
			for (std::size_t j = 0; j < d->ctors.size(); ++j) {
				if (t->branches[j].ctor != d->ctors[j].cname)
					throw type_error(type_error_kind::ill_formed_case, kctx, scrut,
					                 "branch " + std::to_string(j) + " must be for constructor " +
					                     d->ctors[j].cname);
				branches.push_back(resolve(t->branches[j].body));
			}
			return mk_case(t->ident, std::move(motive), std::move(scrut), std::move(branches));
		}
		}
		throw std::logic_error("unreachable surface kind");
	}

	void push(const name& na, const term& ty, std::optional<term> body = std::nullopt) {
		scope.push_back(na.is_anon() ? "" : na.id());
		kctx.push_back(local_decl{na, ty, std::move(body)});
	}
	void pop() {
		scope.pop_back();
		kctx.pop_back();
	}
};

} // namespace detail

// Named-to-de-Bruijn elaboration; binders shadow outward, globals resolve
// to Ind/Construct/Const.
inline term resolve(const global_env& env, const context& ctx, const s_ptr& t) {
	detail::resolver r{env, {}, ctx, nullptr};
	for (const auto& d : ctx) r.scope.push_back(d.na.is_anon() ? "" : d.na.id());
	return r.resolve(t);
}

// parse + resolve in one step.
inline term parse_term(const std::string& src, const context& ctx, const global_env& env) {
	return resolve(env, ctx, parse_surface_term(src));
}

// Elaborates a parsed inductive declaration against env. The declaration is
// not yet checked or added; see kernel::check_inductive.
inline inductive_decl resolve_inductive(const global_env& env, const s_inductive& si) {
	inductive_decl d;
	d.iname = si.iname;
	detail::resolver r{env, {}, {}, &d.iname};

	for (const auto& b : si.params) {
		term ty = b.ty ? r.resolve(b.ty) : mk_type(0);
		d.params.push_back(local_decl{b.na, ty, std::nullopt});
		r.push(b.na, ty);
	}

	term arity = r.resolve(si.arity);
	auto [indices, head] = decompose_prod(arity);
	const auto* s = head.as_sort();
	if (!s)
		throw type_error(type_error_kind::not_a_sort, r.kctx, head,
		                 "inductive arity must end in a sort");
	d.s = s->s;
	// anonymous arity binders get generated names here, not at parse
	std::size_t fresh = 0;
	for (auto& ix : indices) {
		if (ix.na.is_anon()) {
			std::string n = "i";
			for (std::size_t k = 0; k < fresh; ++k) n += "'";
			++fresh;
			ix.na = name::of(n);
		}
	}
	d.indices = std::move(indices);

	for (const auto& sc : si.ctors) {
		std::size_t pushed = 0;
		std::vector<std::pair<name, term>> args;
		for (const auto& b : sc.args) {
			term ty = b.ty ? r.resolve(b.ty) : mk_type(0);
			args.push_back({b.na, ty});
			r.push(b.na, ty);
			++pushed;
		}
		term result = [&] {
			if (sc.result) return r.resolve(sc.result);
			if (!d.indices.empty())
				throw type_error(type_error_kind::ill_formed_case, r.kctx, arity,
				                 "constructor " + sc.cname + " of an indexed inductive needs a result type");
			return mk_apps(mk_ind(d.iname), telescope_rels(d.params.size(), pushed));
		}();
		for (auto it = args.rbegin(); it != args.rend(); ++it) {
			result = mk_prod(it->first, it->second, std::move(result));
			r.pop();
		}
		d.ctors.push_back(constructor_decl{sc.cname, std::move(result)});
	}
	return d;
}

} // namespace derivekit
