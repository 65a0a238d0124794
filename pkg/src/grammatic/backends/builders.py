"""Builder-pattern generation: ANTLR rules that call generated interfaces.

Instead of embedding Java actions, every parser rule creates a builder
object and reports the values of its sub-rules to it. The metadata comes
in two small DSLs carried by SEQUENCE values::

    sum [[ builders = {{ Expression varSum(Scope scope); int constSum(Context context); }}; ]]
        --> mult ..
        [[ #mult.call = { varSum = {{varMult(scope)}}; constSum = {{constMult(context)}}; }; ]];

``builders`` on a symbol declares one ANTLR rule per signature. ``call`` on
a symbol occurrence says which rule of the referenced symbol each of those
signatures calls, and with which arguments. Literal and token matches are
consumed without notifying the builder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import model
from ..errors import Diagnostic, GenerationError, MetadataError, SourceSpan
from ..metadata import AnnotationStore, Id, Int, Punct, Seq, TokenStream, Tuple, quote
from ..model import (ITERATION_SUFFIX, Alternative, CharClass, Iteration, Sequence, StringLiteral,
                     Symbol, SymbolRef)
from .antlr import AntlrWriter, antlr_char_class, default_grammar_name

FACTORY = "IBuilders"
FIELD = "myBuilders"

_SEQ_ITEM, _POSTFIX = 2, 3


@dataclass(frozen=True)
class BuilderSignature:
    rule_name: str
    return_type: str
    params: tuple[tuple[str, str], ...] = ()
    span: SourceSpan | None = field(default=None, compare=False)

    @property
    def interface(self) -> str:
        return f"I{capitalize(self.rule_name)}Builder"

    @property
    def getter(self) -> str:
        return f"get{capitalize(self.rule_name)}Builder"

    def param_text(self) -> str:
        return ", ".join(f"{t} {n}" for t, n in self.params)


@dataclass(frozen=True)
class Call:
    callee: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class BuilderGenConfig:
    grammar_name: str | None = None
    header_action: str | None = None


def capitalize(name: str) -> str:
    return name[:1].upper() + name[1:]


def _type(ts: TokenStream) -> str:
    """A type: dotted name, optional generic arguments, optional ``[]`` pairs."""
    text = ts.ident()
    while ts.is_punct(".") and isinstance(ts.peek(1), Id):
        ts.next()
        text += "." + ts.ident()
    if ts.accept("<"):
        depth, inner = 1, "<"
        while depth:
            tok = ts.next()
            if isinstance(tok, Punct):
                depth += {"<": 1, ">": -1}.get(tok.char, 0)
                inner += tok.char + (" " if tok.char == "," else "")
            elif isinstance(tok, Id):
                inner += tok.name
            else:
                ts.pos -= 1
                ts.fail("unexpected token in type arguments")
        text += inner
    while ts.is_punct("[") and ts.is_punct("]", 1):
        ts.pos += 2
        text += "[]"
    return text


def parse_builders(seq: Seq | tuple) -> list[BuilderSignature]:
    """Parse ``Type name(Type name, ...);`` repeated.

    >>> from grammatic.syntax import parse_value
    >>> [s.rule_name for s in parse_builders(parse_value("{{ int f(); void g(A a); }}"))]
    ['f', 'g']
    """
    ts = TokenStream(seq, "builders")
    out = []
    while not ts.at_end():
        if isinstance(ts.peek(), Id) and ts.is_punct("(", 1):
            ts.fail("missing return type")
        rtype = _type(ts)
        name = ts.ident()
        ts.expect("(")
        params = []
        if not ts.accept(")"):
            while True:
                ptype = _type(ts)
                params.append((ptype, ts.ident()))
                if ts.accept(")"):
                    break
                ts.expect(",")
        ts.expect(";")
        out.append(BuilderSignature(name, rtype, tuple(params)))
    names = [s.rule_name for s in out]
    dup = next((n for n in names if names.count(n) > 1), None)
    if dup:
        raise MetadataError(f"builders: rule {dup!r} declared twice")
    return out


def _parse_call_seq(value, key: str) -> Call:
    if not isinstance(value, Seq):
        raise MetadataError(f"call: value for {key!r} must be a sequence like {{{{f(a)}}}}")
    ts = TokenStream(value, f"call for {key!r}")
    callee = ts.ident()
    ts.expect("(")
    args = []
    if not ts.accept(")"):
        while True:
            tok = ts.peek()
            if isinstance(tok, Id):
                args.append(tok.name)
            elif isinstance(tok, Int):
                args.append(str(tok.value))
            else:
                ts.fail("expected argument")
            ts.next()
            if ts.accept(")"):
                break
            ts.expect(",")
    if not ts.at_end():
        ts.fail("trailing tokens after call")
    return Call(callee, tuple(args))


def parse_call(value: Tuple) -> dict[str, Call]:
    """Map each calling rule name to the callee rule and its argument texts."""
    if not isinstance(value, Tuple):
        raise MetadataError("call must be a tuple of rule = {{callee(args)}} entries")
    out = {}
    for name, v in value.fields:
        if name in out:
            raise MetadataError(f"call: duplicate entry for {name!r}")
        out[name] = _parse_call_seq(v, name)
    return out


class BuilderGenerator:
    def __init__(self, grammar: model.Grammar, store: AnnotationStore | None,
                 config: BuilderGenConfig | None = None, diagnostics: list | None = None):
        self.grammar = grammar
        self.store = store if store is not None else AnnotationStore(grammar)
        self.config = config or BuilderGenConfig()
        self.diagnostics = diagnostics if diagnostics is not None else []
        # plain lexer rules are rendered by the ANTLR writer with no annotations
        self.lexer = AntlrWriter(grammar, AnnotationStore(grammar))
        self.lexical = self.lexer.lexical
        self.signatures: dict[str, list[BuilderSignature]] = {}
        seen: dict[str, str] = {}
        for s in grammar.symbols:
            value = self.store.lookup(s.id, "builders")
            if value is None:
                continue
            origin = self.store.attachment(s.id, "builders").origin
            if s.name in self.lexical:
                raise GenerationError(f"lexical symbol {s.name!r} cannot declare builders", origin)
            if not isinstance(value, Seq):
                raise GenerationError("attribute 'builders' must be a SEQUENCE", origin)
            try:
                sigs = parse_builders(value)
            except MetadataError as e:
                raise GenerationError(e.message, origin) from None
            for sig in sigs:
                if sig.rule_name in seen:
                    raise GenerationError(
                        f"rule {sig.rule_name!r} declared by both {seen[sig.rule_name]!r} "
                        f"and {s.name!r}", origin)
                if sig.rule_name in {self.lexer.names[n] for n in self.lexical}:
                    raise GenerationError(
                        f"builder rule {sig.rule_name!r} clashes with a generated lexer rule", origin)
                seen[sig.rule_name] = s.name
            self.signatures[s.name] = sigs
        # interface methods per signature, in first-use order
        self.methods: dict[str, dict[str, str]] = {}

    def calls(self, ref: SymbolRef) -> dict[str, Call]:
        value = self.store.lookup(ref.id, "call")
        if value is None:
            return {}
        try:
            return parse_call(value)
        except MetadataError as e:
            raise GenerationError(e.message, self.store.attachment(ref.id, "call").origin) from None

    def callee_signature(self, ref: SymbolRef, sig: BuilderSignature) -> tuple[BuilderSignature, Call]:
        call = self.calls(ref).get(sig.rule_name)
        if call is None:
            raise GenerationError(
                f"occurrence of {ref.name!r} in rule {sig.rule_name!r} has no call entry "
                f"for {sig.rule_name!r}", ref.span)
        for target in self.signatures[ref.name]:
            if target.rule_name == call.callee:
                return target, call
        raise GenerationError(
            f"{call.callee!r} is not a builder rule of symbol {ref.name!r}", ref.span)

    # -- rules -------------------------------------------------------------------------

    def rule(self, symbol: Symbol, sig: BuilderSignature) -> str:
        methods = self.methods.setdefault(sig.rule_name, {})
        labels: dict[str, int] = {}
        writer = _BodyWriter(self, sig, methods, labels)
        bodies = [writer.expr(p.body, 1) for p in symbol.productions]
        body = bodies[0] if len(bodies) == 1 else "(" + " | ".join(bodies) + ")"
        head = sig.rule_name
        if sig.params:
            head += f" [{sig.param_text()}]"
        void = sig.return_type == "void"
        if not void:
            head += f" returns [{sig.return_type} result]"
        args = ", ".join(n for _, n in sig.params)
        parts = [body] if body else []
        if not void:
            parts.append("{result = builder.getResult();}")
        return "\n".join([
            head,
            "@init {",
            f"    {sig.interface} builder = {FIELD}.{sig.getter}({args});",
            "}",
            "    : " + " ".join(parts),
            "    ;",
        ])

    def interfaces(self) -> list[tuple[str, str]]:
        out = []
        for sym in self.grammar.symbols:
            for sig in self.signatures.get(sym.name, ()):
                lines = [f"public interface {sig.interface} {{"]
                for callee, ctype in self.methods.get(sig.rule_name, {}).items():
                    param = "" if ctype == "void" else f"{ctype} value"
                    lines.append(f"    void {callee}({param});")
                if sig.return_type != "void":
                    lines.append(f"    {sig.return_type} getResult();")
                lines.append("}")
                out.append((sig.interface, "\n".join(lines) + "\n"))
        lines = [f"public interface {FACTORY} {{"]
        for sym in self.grammar.symbols:
            for sig in self.signatures.get(sym.name, ()):
                lines.append(f"    {sig.interface} {sig.getter}({sig.param_text()});")
        lines.append("}")
        out.append((FACTORY, "\n".join(lines) + "\n"))
        return out

    def generate(self) -> tuple[str, list[tuple[str, str]]]:
        if not self.signatures:
            raise GenerationError("no symbol declares 'builders'")
        name = self.config.grammar_name or default_grammar_name(self.grammar)
        out = [f"grammar {name};", ""]
        if self.config.header_action is not None:
            out += ["@header {", self.config.header_action.strip("\n"), "}", ""]
        out += ["@members {",
                f"    private {FACTORY} {FIELD};",
                "",
                f"    public void setBuilders({FACTORY} builders) {{",
                f"        {FIELD} = builders;",
                "    }",
                "}",
                ""]
        for s in self.grammar.symbols:
            if s.name in self.signatures:
                for sig in self.signatures[s.name]:
                    out += [self.rule(s, sig), ""]
            elif s.name in self.lexical:
                out += [self.lexer.symbol(s), ""]
            else:
                self.diagnostics.append(Diagnostic(
                    f"symbol {s.name!r} declares no builders; no rule generated", s.span))
        return "\n".join(out), self.interfaces()


class _BodyWriter:
    def __init__(self, gen: BuilderGenerator, sig: BuilderSignature,
                 methods: dict[str, str], labels: dict[str, int]):
        self.gen = gen
        self.sig = sig
        self.methods = methods
        self.labels = labels

    def label(self, callee: str) -> str:
        """camelCase initials plus an ordinal for repeats: varMult -> vm, vm1, ..."""
        prefix = (callee[0] + "".join(c for c in callee[1:] if c.isupper())).lower()
        reserved = {n for _, n in self.sig.params} | {"builder", "result"}
        while True:
            k = self.labels.get(prefix, 0)
            self.labels[prefix] = k + 1
            lbl = prefix if k == 0 else f"{prefix}{k}"
            if lbl not in reserved:
                return lbl

    def ref(self, node: SymbolRef, ctx: int) -> str:
        gen = self.gen
        if node.name in gen.lexical:
            return gen.lexer.names[node.name]
        if node.name not in gen.signatures:
            raise GenerationError(
                f"rule {self.sig.rule_name!r} refers to {node.name!r}, which declares no builders",
                node.span)
        target, call = gen.callee_signature(node, self.sig)
        known = self.methods.get(call.callee)
        if known is not None and known != target.return_type:
            raise GenerationError(
                f"builder method {call.callee!r} used with types {known!r} and "
                f"{target.return_type!r}", node.span)
        self.methods[call.callee] = target.return_type
        invocation = call.callee + (f"[{', '.join(call.args)}]" if call.args else "")
        if target.return_type == "void":
            text = f"{invocation} {{builder.{call.callee}();}}"
        else:
            lbl = self.label(call.callee)
            text = f"{lbl}={invocation} {{builder.{call.callee}({lbl});}}"
        return f"({text})" if ctx >= _POSTFIX else text

    def expr(self, node, ctx: int) -> str:
        if isinstance(node, SymbolRef):
            return self.ref(node, ctx)
        if isinstance(node, StringLiteral):
            return quote(node.text)
        if isinstance(node, CharClass):
            return antlr_char_class(node.items)
        if isinstance(node, Iteration):
            return self.expr(node.child, _POSTFIX) + ITERATION_SUFFIX[node.kind]
        if isinstance(node, Sequence):
            if not node.children:
                return "" if ctx < _SEQ_ITEM else "()"
            text = " ".join(t for t in (self.expr(c, _SEQ_ITEM) for c in node.children) if t)
            return f"({text})" if ctx >= _SEQ_ITEM and len(node.children) > 1 else text
        if isinstance(node, Alternative):
            text = " | ".join(self.expr(c, 1) for c in node.children)
            return f"({text})"
        raise GenerationError(f"cannot generate for {model.kind_of(node)}",
                              getattr(node, "span", None))


def generate_builders(grammar: model.Grammar, store: AnnotationStore | None = None,
                      config: BuilderGenConfig | None = None,
                      diagnostics: list | None = None) -> tuple[str, list[tuple[str, str]]]:
    """Return the ANTLR grammar text and ``(interface name, Java source)`` pairs.

    The last pair is always the ``IBuilders`` factory.
    """
    return BuilderGenerator(grammar, store, config, diagnostics).generate()
