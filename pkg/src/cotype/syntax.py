"""Session files: constructor declarations, data-systems and programs.

Grammar (``#`` starts a comment)::

    session      := item*
    item         := constructors | system | program
    constructors := "constructors" "{" IDENT "/" NUM ("," IDENT "/" NUM)* "}"
    system       := "system" IDENT "{" bundle+ "}"
    bundle       := ("inductive" | "coinductive") "bundle" "{" typedecl+ rule* "}"
    typedecl     := ("type" | "types") IDENT ("," IDENT)* ";"
    ind-rule     := IDENT "(" pattern ")" ["<-" atom ("&" atom)*] ";"
    coind-rule   := IDENT "(" IDENT ")" "->" disjunct ("|" disjunct)* ";"
    disjunct     := IDENT | IDENT "(" IDENT ("," IDENT)* ")" "with" atom ("&" atom)*
    pattern      := IDENT | IDENT "(" IDENT ("," IDENT)* ")"
    atom         := IDENT "(" IDENT ")"
    program      := "program" IDENT [":" IDENT] "{" equation* "}"
    equation     := IDENT ["(" term ("," term)* ")"] "=" term ";"
    term         := IDENT ["(" term ("," term)* ")"]

Identifiers are runs of word characters and primes, so ``0`` and ``1`` are
legal constructor names.  A bare identifier in a program is a constructor if
declared, a function if some equation defines it (or it is a standard
destructor/discriminator), and a variable otherwise.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .datasystem import (
    ArityMismatch, Bundle, ConstructorStatement, DataSystem, DataSystemError, Polarity,
    UnknownName, ValidatedSystem, validate,
)
from .errors import CotypeError
from .program import (
    Program, ProgramEquation, ProgramError, check_wellformed, destructor, destructor_width,
    discriminator,
)
from .terms import Call, Con, Constructor, FunctionId, Term, Var, Vocabulary


class ParseError(CotypeError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow><-|->)
  | (?P<ident>[\w']+)
  | (?P<punct>[{}()\[\],;:/=&|])
""", re.VERBOSE)

KEYWORDS = {"constructors", "system", "program", "inductive", "coinductive", "bundle",
            "type", "types", "with"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", (line, pos - line_start + 1))
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        for nl in re.finditer("\n", m.group()):
            line += 1
            line_start = pos + nl.end()
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


# raw program syntax, before identifiers are classified
@dataclass
class _App:
    name: str
    args: list["_App"] | None  # None: bare identifier
    loc: tuple[int, int]


@dataclass
class SessionFile:
    vocabulary: Vocabulary
    systems: dict[str, ValidatedSystem] = field(default_factory=dict)
    programs: dict[str, Program] = field(default_factory=dict)


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def loc(self, tok=None):
        tok = tok or self.tok
        return (tok.line, tok.col)

    def error(self, msg, tok=None):
        return ParseError(msg, self.loc(tok))

    def next(self):
        t = self.tok
        self.i += 1
        return t

    def at(self, text):
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text):
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def ident(self, what="identifier"):
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        return self.next()

    def number(self):
        t = self.ident("number")
        if not t.text.isdigit():
            raise self.error("expected a number", t)
        return int(t.text)

    def comma_list(self, item, close):
        out = [item()]
        while self.at(","):
            self.next()
            out.append(item())
        if close:
            self.expect(close)
        return out

    # top level
    def session(self) -> SessionFile:
        vocab = None
        raw_systems, raw_programs = [], []
        while self.tok.kind != "eof":
            kw = self.tok
            if kw.text == "constructors":
                if vocab is not None:
                    raise self.error("constructors declared twice")
                vocab = self.constructors()
            elif kw.text == "system":
                raw_systems.append(self.mark())
                self.skip_block()
            elif kw.text == "program":
                raw_programs.append(self.mark())
                self.skip_block()
            else:
                raise self.error(f"expected constructors, system or program; found {kw.text!r}")
        if vocab is None:
            raise ParseError("missing constructors block", (1, 1))
        out = SessionFile(vocab)
        for start in raw_systems:
            self.i = start
            name, ds = self.system(vocab)
            if name in out.systems:
                raise self.error(f"system {name} defined twice", self.toks[start])
            out.systems[name] = ds
        for start in raw_programs:
            self.i = start
            name, prog = self.program(vocab)
            if name in out.programs:
                raise self.error(f"program {name} defined twice", self.toks[start])
            out.programs[name] = prog
        return out

    def mark(self):
        return self.i

    def skip_block(self):
        while not self.at("{"):
            if self.tok.kind == "eof":
                raise self.error("expected '{'")
            self.next()
        depth = 0
        while True:
            t = self.next()
            if t.kind == "eof":
                raise self.error("unterminated block", t)
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth == 0:
                    return

    def constructors(self) -> Vocabulary:
        self.expect("constructors")
        self.expect("{")

        def decl():
            name = self.ident("constructor name")
            self.expect("/")
            return Constructor(name.text, self.number()), name

        decls = self.comma_list(decl, "}")
        try:
            return Vocabulary([c for c, _ in decls])
        except ValueError as e:
            raise ParseError(str(e), self.loc(decls[0][1])) from None

    # data-systems
    def system(self, vocab):
        self.expect("system")
        name_tok = self.ident("system name")
        name = name_tok.text
        self.expect("{")
        bundles = []
        while not self.at("}"):
            bundles.append(self.bundle(vocab))
        self.expect("}")
        ds = DataSystem(vocab, tuple(bundles), name)
        try:
            return name, validate(ds)
        except DataSystemError as e:
            if e.location is None:
                e.location = self.loc(name_tok)
            raise

    def bundle(self, vocab) -> Bundle:
        kw = self.tok
        if kw.text not in ("inductive", "coinductive"):
            raise self.error("expected 'inductive' or 'coinductive'")
        self.next()
        polarity = Polarity(kw.text)
        self.expect("bundle")
        self.expect("{")
        types = []
        while self.at("type") or self.at("types"):
            self.next()
            types.extend(t.text for t in self.comma_list(lambda: self.ident("type name"), ";"))
        if not types:
            raise self.error("a bundle starts with its type declarations")
        ind, coind = [], {}
        while not self.at("}"):
            if polarity is Polarity.INDUCTIVE:
                ind.append(self.inductive_rule(vocab))
            else:
                start = self.tok
                t, disjuncts = self.coinductive_rule(vocab)
                if t in coind:
                    raise self.error(f"second deconstruction rule for {t}", start)
                coind[t] = disjuncts
        self.expect("}")
        return Bundle(polarity, tuple(types), tuple(ind), coind)

    def constructor(self, vocab, tok):
        if tok.text not in vocab:
            raise UnknownName(f"unknown constructor {tok.text!r}", self.loc(tok))
        return vocab[tok.text]

    def atom(self):
        t = self.ident("type name")
        self.expect("(")
        v = self.ident("variable")
        self.expect(")")
        return t.text, v

    def statement(self, vocab, head, params, atoms) -> ConstructorStatement:
        c = self.constructor(vocab, head)
        if len(params) != c.arity:
            raise ArityMismatch(f"{c} takes {c.arity} components, got {len(params)}", self.loc(head))
        names = [p.text for p in params]
        if len(set(names)) != len(names):
            raise DataSystemError("component variables must be distinct", self.loc(head))
        typing = {}
        for tname, v in atoms:
            if v.text not in names:
                raise DataSystemError(f"variable {v.text!r} is not a component of {c.name}",
                                      self.loc(v))
            if v.text in typing:
                raise DataSystemError(f"variable {v.text!r} typed twice", self.loc(v))
            typing[v.text] = tname
        missing = [n for n in names if n not in typing]
        if missing:
            raise ArityMismatch(f"component {missing[0]!r} of {c.name} has no type", self.loc(head))
        return ConstructorStatement(c, tuple(typing[n] for n in names))

    def params(self):
        if not self.at("("):
            return []
        self.next()
        return self.comma_list(lambda: self.ident("variable"), ")")

    def inductive_rule(self, vocab):
        target = self.ident("type name")
        self.expect("(")
        head = self.ident("constructor")
        params = self.params()
        self.expect(")")
        atoms = []
        if self.at("<-"):
            self.next()
            atoms.append(self.atom())
            while self.at("&"):
                self.next()
                atoms.append(self.atom())
        self.expect(";")
        return target.text, self.statement(vocab, head, params, atoms)

    def coinductive_rule(self, vocab):
        target = self.ident("type name")
        self.expect("(")
        self.ident("variable")
        self.expect(")")
        self.expect("->")
        disjuncts = [self.disjunct(vocab)]
        while self.at("|"):
            self.next()
            disjuncts.append(self.disjunct(vocab))
        self.expect(";")
        return target.text, tuple(disjuncts)

    def disjunct(self, vocab):
        head = self.ident("constructor")
        params = self.params()
        atoms = []
        if params:
            self.expect("with")
            atoms.append(self.atom())
            while self.at("&"):
                self.next()
                atoms.append(self.atom())
        return self.statement(vocab, head, params, atoms)

    # programs
    def raw_term(self) -> _App:
        t = self.ident("term")
        if not self.at("("):
            return _App(t.text, None, self.loc(t))
        self.next()
        return _App(t.text, self.comma_list(self.raw_term, ")"), self.loc(t))

    def program(self, vocab):
        self.expect("program")
        name = self.ident("program name").text
        principal = None
        if self.at(":"):
            self.next()
            principal = self.ident("function name").text
        self.expect("{")
        raw = []
        while not self.at("}"):
            lhs = self.raw_term()
            self.expect("=")
            rhs = self.raw_term()
            self.expect(";")
            raw.append((lhs, rhs))
        self.expect("}")
        return name, build_program(vocab, raw, principal, name)


def _functions(vocab, raw_eqs):
    fns: dict[str, FunctionId] = {}
    for lhs, _ in raw_eqs:
        if lhs.name in vocab:
            raise ProgramError(f"{lhs.name!r} is a constructor, not a function", lhs.loc)
        arity = len(lhs.args or [])
        if fns.setdefault(lhs.name, FunctionId(lhs.name, arity)).arity != arity:
            raise ProgramError(f"{lhs.name} defined with different arities", lhs.loc)
    for i in range(1, destructor_width(vocab) + 1):
        fns.setdefault(destructor(i).name, destructor(i))
    d = discriminator(vocab)
    fns.setdefault(d.name, d)
    return fns


def _pattern(vocab, fns, raw: _App) -> Term:
    if raw.name in vocab:
        c = vocab[raw.name]
        args = raw.args or []
        if len(args) != c.arity:
            raise ProgramError(f"{c} applied to {len(args)} arguments", raw.loc)
        return Con(c, tuple(_pattern(vocab, fns, a) for a in args))
    if raw.args is not None or raw.name in fns:
        raise ProgramError(f"{raw.name!r} in a pattern is neither a constructor nor a variable",
                           raw.loc)
    return Var(raw.name)


def _resolve(vocab, fns, raw: _App) -> Term:
    args = raw.args or []
    if raw.name in vocab:
        c = vocab[raw.name]
        if len(args) != c.arity:
            raise ProgramError(f"{c} applied to {len(args)} arguments", raw.loc)
        return Con(c, tuple(_resolve(vocab, fns, a) for a in args))
    fn = fns.get(raw.name)
    if fn is None:
        if raw.args is not None:
            raise ProgramError(f"undefined function {raw.name!r}", raw.loc)
        return Var(raw.name)
    if len(args) != fn.arity:
        raise ProgramError(f"{fn} applied to {len(args)} arguments", raw.loc)
    return Call(fn, tuple(_resolve(vocab, fns, a) for a in args))


def build_program(vocab: Vocabulary, raw_eqs, principal=None, name="") -> Program:
    fns = _functions(vocab, raw_eqs)
    eqs = []
    for lhs, rhs in raw_eqs:
        fn = fns[lhs.name]
        pats = tuple(_pattern(vocab, fns, a) for a in lhs.args or [])
        eqs.append(ProgramEquation(fn, pats, _resolve(vocab, fns, rhs), lhs.loc))
    if principal is not None and principal not in fns:
        raise ProgramError(f"principal function {principal!r} is not defined")
    return check_wellformed(Program.build(vocab, eqs, principal, name))


def parse_session(text: str) -> SessionFile:
    return _Parser(text).session()


def parse_term(text: str, vocab: Vocabulary, program: Program | None = None) -> Term:
    """Parse a term; identifiers resolve against ``program``'s functions."""
    p = _Parser(text)
    raw = p.raw_term()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after term")
    fns = program.functions() if program is not None else {}
    return _resolve(vocab, fns, raw)


def parse_program(text: str, vocab: Vocabulary, principal=None, name="") -> Program:
    """Parse a bare sequence of equations."""
    p = _Parser(text)
    raw = []
    while p.tok.kind != "eof":
        lhs = p.raw_term()
        p.expect("=")
        rhs = p.raw_term()
        p.expect(";")
        raw.append((lhs, rhs))
    return build_program(vocab, raw, principal, name)


# ------------------------------------------------------------- printing

def format_vocabulary(vocab: Vocabulary) -> str:
    return "constructors { " + ", ".join(str(c) for c in vocab) + " }"


def _format_statement(stmt: ConstructorStatement) -> str:
    return str(stmt)


def format_system(ds: DataSystem | ValidatedSystem, name: str | None = None) -> str:
    if isinstance(ds, ValidatedSystem):
        ds = ds.system
    lines = [f"system {name or ds.name or 'S'} {{"]
    for b in ds.bundles:
        lines.append(f"  {b.polarity.value} bundle {{")
        lines.append(f"    type {', '.join(b.types)};")
        if b.inductive:
            for target, stmt in b.inductive_rules:
                c = stmt.constructor
                ys = [f"y{i + 1}" for i in range(c.arity)]
                pat = c.name if not ys else f"{c.name}({', '.join(ys)})"
                body = " & ".join(f"{t}({y})" for t, y in zip(stmt.component_types, ys))
                lines.append(f"    {target}({pat})" + (f" <- {body};" if body else ";"))
        else:
            for t in b.types:
                alts = " | ".join(_format_statement(s) for s in b.coinductive_rules[t])
                lines.append(f"    {t}(x) -> {alts};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def format_program(p: Program) -> str:
    head = f"program {p.name or 'P'}"
    if p.principal is not None:
        head += f" : {p.principal.name}"
    body = [f"  {eq};" for eq in p.user_equations()]
    return "\n".join([head + " {", *body, "}"])


def format_session(s: SessionFile) -> str:
    parts = [format_vocabulary(s.vocabulary)]
    parts += [format_system(ds, name) for name, ds in s.systems.items()]
    parts += [format_program(p) for p in s.programs.values()]
    return "\n\n".join(parts) + "\n"
