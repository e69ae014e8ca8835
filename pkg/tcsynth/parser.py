"""
Parser module.

Recursive-descent parser and renderer for the ``.tc`` declaration
language, a small Lean-flavoured subset with classes, structures,
instances, definitions, ``#synth`` goals and ``letI`` sections.

Contains
--------
* :func:`tcsynth.parser.parse_file`
* :func:`tcsynth.parser.parse_term`
* :func:`tcsynth.parser.render_decl`
* :func:`tcsynth.parser.render_file`
* command classes :class:`ClassDecl`, :class:`StructureDecl`,
  :class:`InstanceDecl`, :class:`DefDecl`, :class:`AttributeDecl`,
  :class:`SetOption`, :class:`SynthGoal`, :class:`LetI`,
  :class:`LocalInstanceBlock`
"""
import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

from ._exceptions import TCParseError
from .terms import Const, NatLit, Term, Var, render, vars_of

KEYWORDS = frozenset([
    'set_option', 'class', 'structure', 'instance', 'def', 'attribute',
    'extends', 'out_param', 'data', 'proof', 'opaque', 'priority', 'section',
    'end', 'letI', 'true', 'false'
])

# lexer aliases for the unicode number types
ALIASES = {'ℕ': 'nat', 'ℤ': 'int'}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<attr>@\[)
  | (?P<synth>\#synth)
  | (?P<assign>:=)
  | (?P<nat>\d+)
  | (?P<ident>[^\W\d][\w.'!?]*)
  | (?P<punct>[()\[\]{}:,+*])
    """, re.VERBOSE)

# identifiers auto-bound as variables inside instance and def declarations,
# unless applied or already declared
_AUTO_BOUND_RE = re.compile(r"^[A-Za-zα-ωΑ-Ω][0-9'₀-₉]*$")

STYLES = ('explicit', 'implicit', 'instance')
_OPEN = {'explicit': '(', 'implicit': '{', 'instance': '['}
_CLOSE = {'(': ')', '{': '}', '[': ']'}

USER = 'user'
PROJECTION = 'projection'


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def end_col(self):
        return self.col + len(self.text)


@dataclass(frozen=True)
class Binder:
    """Binder of a declaration telescope."""

    name: Optional[str]
    type: Term
    style: str = 'explicit'
    out: bool = False


@dataclass(frozen=True)
class Field:
    """Class field; ``kind`` is data or proof."""

    name: str
    type: Term
    kind: str = 'proof'


@dataclass(frozen=True)
class SetOption:
    name: str
    value: bool
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ClassDecl:
    """
    Class declaration.

    ``fields`` are the declared fields as parsed; the environment builder
    replaces them by the flattened (old mode) or embedded (new mode) list
    and records the structure ``mode``.
    """

    keyword = 'class'

    name: str
    binders: Tuple[Binder, ...] = ()
    parents: Tuple[Term, ...] = ()
    fields: Tuple[Field, ...] = ()
    sort: Optional[Term] = None
    mode: Optional[str] = None
    line: int = field(default=0, compare=False)

    @property
    def params(self):
        """(name, in|out) for every explicit or implicit binder."""
        return tuple((b.name, 'out' if b.out else 'in') for b in self.binders
                     if b.style != 'instance')

    @property
    def param_names(self):
        return tuple(name for name, _ in self.params)

    @property
    def out_positions(self):
        return tuple(
            i for i, (_, mode) in enumerate(self.params) if mode == 'out')

    @property
    def constraints(self):
        """Binder-expressed (unbundled) superclasses."""
        return tuple(b for b in self.binders if b.style == 'instance')

    @property
    def is_class(self):
        return self.keyword == 'class'


@dataclass(frozen=True)
class StructureDecl(ClassDecl):
    """Record type: flattened like a class, never an instance head."""

    keyword = 'structure'


@dataclass(frozen=True)
class InstanceDecl:
    """
    Instance declaration, read as a Horn clause.

    ``assigns`` is a tuple of (field, term) pairs, or None for ``opaque``;
    ``priority`` None stands for the default user priority.
    """

    name: str
    binders: Tuple[Binder, ...]
    head: Term
    priority: Optional[int] = None
    assigns: Optional[Tuple[Tuple[str, Term], ...]] = None
    provenance: str = USER
    anonymous: bool = field(default=False, compare=False)
    line: int = field(default=0, compare=False)

    @property
    def instance_binders(self):
        return tuple(b for b in self.binders if b.style == 'instance')

    @property
    def variables(self):
        """Names of every variable bound by the declaration."""
        names = [b.name for b in self.binders if b.style != 'instance']
        for t in [b.type for b in self.binders] + [self.head]:
            names.extend(v.name for v in vars_of(t))
        return tuple(dict.fromkeys(names))

    @property
    def assign_map(self):
        return dict(self.assigns or ())


@dataclass(frozen=True)
class DefDecl:
    """
    Definition.

    ``body`` is a term (reducible definition), a tuple of field
    assignments, or None for ``opaque``.
    """

    name: str
    binders: Tuple[Binder, ...] = ()
    type: Optional[Term] = None
    body: object = None
    line: int = field(default=0, compare=False)

    @property
    def reducible(self):
        return isinstance(self.body, (Const, Var, NatLit))


@dataclass(frozen=True)
class AttributeDecl:
    """``attribute [instance] name``."""

    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SynthGoal:
    goal: Term
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LetI:
    """
    Local instance.

    Either a hypothesis ``letI h : head`` or the application of a
    declaration ``letI := decl args``.
    """

    name: Optional[str] = None
    head: Optional[Term] = None
    value: Optional[Term] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LocalInstanceBlock:
    """``section NAME`` ... ``end NAME`` with letI items and goals."""

    name: str
    items: Tuple[object, ...] = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SourceFile:
    commands: Tuple[object, ...] = ()
    path: Optional[str] = field(default=None, compare=False)


def tokenize(text):
    """
    Split a source text into tokens.

    Parameters
    ----------
    text: str
        Source text

    Returns
    -------
    list
        List of :class:`Token`
    """
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TCParseError('unexpected character {!r}'.format(text[pos]),
                               line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        value = m.group()
        if kind not in ('ws', 'comment'):
            if kind == 'ident':
                value = ALIASES.get(value, value)
                if value in KEYWORDS:
                    kind = 'keyword'
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        newlines = value.count('\n') if kind in ('ws', 'comment') else 0
        if newlines:
            line += newlines
            line_start = m.start() + value.rindex('\n') + 1
        pos = m.end()
    return tokens


class _Parser(object):
    """Recursive-descent parser over a token list."""

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0
        self.anonymous = {}
        # scope of bound variable names; auto collects auto-bound ones
        self.scope = None
        self.auto = None
        self.command_start = 0
        # classes, structures, defs and instances declared so far
        self.declared = set()

    # -- token helpers
    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, text, offset=0):
        tok = self.peek(offset)
        return tok is not None and tok.kind != 'ident' and tok.text == text

    def at_ident(self, offset=0):
        tok = self.peek(offset)
        return tok is not None and tok.kind == 'ident'

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, expected=()):
        tok = self.peek()
        prev = self.tokens[self.pos - 1] if self.pos > 0 else None
        text = tok.text if tok is not None else '<eof>'
        inside = self.pos > self.command_start
        if inside and prev is not None and (tok is None
                                            or tok.line > prev.line):
            # stopped at the start of a later line: blame the end of the
            # last consumed token
            line, col = prev.line, prev.end_col
        elif tok is not None:
            line, col = tok.line, tok.col
        elif self.tokens:
            last = self.tokens[-1]
            line, col = last.line, last.end_col
        else:
            line, col = 1, 1
        return TCParseError(
            '{}, got {!r}'.format(message, text), line, col, text, expected)

    def expect(self, text):
        if not self.at(text):
            raise self.error('expected {!r}'.format(text), [repr(text)])
        return self.advance()

    def expect_ident(self):
        if not self.at_ident():
            raise self.error('expected identifier', ['identifier'])
        return self.advance().text

    # -- terms
    def _name_term(self, name, head=False):
        if name in self.scope:
            return Var(name)
        if self.auto is not None and not head and name not in self.declared \
                and _AUTO_BOUND_RE.match(name):
            self.scope.add(name)
            self.auto.append(name)
            return Var(name)
        return Const(name)

    def atom(self):
        tok = self.peek()
        if tok is None:
            raise self.error('expected term', ['term'])
        if tok.kind == 'nat':
            self.advance()
            return NatLit(int(tok.text))
        if tok.kind == 'ident':
            self.advance()
            return self._name_term(tok.text)
        if self.at('('):
            self.advance()
            t = self.term()
            self.expect(')')
            return t
        raise self.error('expected term', ['identifier', 'number', "'('"])

    def _starts_atom(self):
        tok = self.peek()
        return tok is not None and (tok.kind in ('ident', 'nat')
                                    or self.at('('))

    def application(self):
        if not self.at_ident():
            return self.atom()
        tok = self.advance()
        if not self._starts_atom():
            return self._name_term(tok.text)
        head = self._name_term(tok.text, head=True)
        args = []
        while self._starts_atom():
            args.append(self.atom())
        if isinstance(head, Var):
            raise TCParseError(
                'variable {!r} cannot be applied'.format(tok.text), tok.line,
                tok.col, tok.text)
        return Const(head.name, tuple(args))

    def term(self):
        lhs = self.application()
        for op, name in (('+', 'add'), ('*', 'mul')):
            if self.at(op):
                self.advance()
                rhs = self.application()
                return Const(name, (lhs, rhs))
        return lhs

    # -- binders and fields
    def binders(self):
        binders = []
        while self.at('(') or self.at('{') or self.at('['):
            binders.extend(self.binder())
        return tuple(binders)

    def binder(self):
        opening = self.advance().text
        if opening == '[':
            name = None
            if self.at_ident() and self.at(':', 1):
                name = self.advance().text
                self.advance()
            t = self.term()
            self.expect(']')
            if name is not None:
                self.scope.add(name)
            return [Binder(name, t, 'instance')]
        names = [self.expect_ident()]
        while self.at_ident():
            names.append(self.advance().text)
        self.expect(':')
        out = False
        if self.at('out_param'):
            self.advance()
            out = True
        t = self.term()
        self.expect(_CLOSE[opening])
        self.scope.update(names)
        style = 'explicit' if opening == '(' else 'implicit'
        return [Binder(name, t, style, out) for name in names]

    def fields(self):
        fields = []
        while self.at('('):
            self.advance()
            name = self.expect_ident()
            self.expect(':')
            t = self.term()
            kind = 'proof'
            if self.at(','):
                self.advance()
                if not (self.at('data') or self.at('proof')):
                    raise self.error('expected field tag', ["'data'", "'proof'"])
                kind = self.advance().text
            self.expect(')')
            fields.append(Field(name, t, kind))
        return tuple(fields)

    def assigns(self):
        self.expect('{')
        assigns = []
        while self.at_ident():
            name = self.advance().text
            self.expect(':=')
            assigns.append((name, self.term()))
            if not self.at(','):
                break
            self.advance()
        self.expect('}')
        return tuple(assigns)

    # -- commands
    def parse(self):
        commands = []
        while self.peek() is not None:
            commands.append(self.command())
        return tuple(commands)

    def command(self):
        tok = self.peek()
        self.scope, self.auto = set(), None
        self.command_start = self.pos
        if self.at('set_option'):
            self.advance()
            name = self.expect_ident()
            if not (self.at('true') or self.at('false')):
                raise self.error('expected boolean', ["'false'", "'true'"])
            return SetOption(name, self.advance().text == 'true', tok.line)
        if self.at('class') or self.at('structure'):
            return self.class_decl()
        if self.at('instance') or tok.kind == 'attr':
            return self.instance_decl()
        if self.at('def'):
            return self.def_decl()
        if self.at('attribute'):
            self.advance()
            self.expect('[')
            self.expect('instance')
            self.expect(']')
            return AttributeDecl(self.expect_ident(), tok.line)
        if tok.kind == 'synth':
            self.advance()
            return SynthGoal(self.term(), tok.line)
        if self.at('section'):
            return self.section()
        raise self.error('expected command', [
            "'#synth'", "'@['", "'attribute'", "'class'", "'def'",
            "'instance'", "'section'", "'set_option'", "'structure'"
        ])

    def class_decl(self):
        tok = self.advance()
        cls = StructureDecl if tok.text == 'structure' else ClassDecl
        name = self.expect_ident()
        self.declared.add(name)
        binders = self.binders()
        sort = None
        if self.at(':'):
            self.advance()
            sort = self.term()
        parents = []
        if self.at('extends'):
            self.advance()
            parents.append(self.term())
            while self.at(','):
                self.advance()
                parents.append(self.term())
        fields = ()
        if self.at(':='):
            self.advance()
            fields = self.fields()
        return cls(name, binders, tuple(parents), fields, sort, line=tok.line)

    def instance_decl(self):
        first = self.peek()
        priority = None
        if first.kind == 'attr':
            self.advance()
            self.expect('priority')
            if self.peek() is None or self.peek().kind != 'nat':
                raise self.error('expected priority', ['number'])
            priority = int(self.advance().text)
            self.expect(']')
        self.expect('instance')
        self.auto = []
        name = self.advance().text if self.at_ident() else None
        if name is not None:
            self.declared.add(name)
        binders = self.binders()
        self.expect(':')
        head = self.term()
        assigns = None
        if self.at(':='):
            self.advance()
            if self.at('opaque'):
                self.advance()
            else:
                assigns = self.assigns()
        anonymous = name is None
        if anonymous:
            head_name = head.name if isinstance(head, Const) else 'inst'
            n = self.anonymous.get(head_name, 0) + 1
            self.anonymous[head_name] = n
            name = '{}.inst{}'.format(head_name, n)
        return InstanceDecl(name, binders, head, priority, assigns,
                            anonymous=anonymous, line=first.line)

    def def_decl(self):
        tok = self.advance()
        self.auto = []
        name = self.expect_ident()
        self.declared.add(name)
        binders = self.binders()
        type_ = None
        if self.at(':'):
            self.advance()
            type_ = self.term()
        self.expect(':=')
        if self.at('opaque'):
            self.advance()
            body = None
        elif self.at('{'):
            body = self.assigns()
        else:
            body = self.term()
        return DefDecl(name, binders, type_, body, tok.line)

    def section(self):
        tok = self.advance()
        name = self.expect_ident()
        items = []
        while not self.at('end'):
            item = self.peek()
            self.scope, self.auto = set(), None
            self.command_start = self.pos
            if item is None:
                raise self.error("expected 'end'", ["'end'"])
            if self.at('letI'):
                self.advance()
                if self.at(':='):
                    self.advance()
                    items.append(LetI(value=self.term(), line=item.line))
                else:
                    hyp = self.expect_ident()
                    self.expect(':')
                    items.append(LetI(hyp, self.term(), line=item.line))
            elif item.kind == 'synth':
                self.advance()
                items.append(SynthGoal(self.term(), item.line))
            else:
                raise self.error('expected section item',
                                 ["'#synth'", "'end'", "'letI'"])
        self.advance()
        closing = self.peek()
        if self.expect_ident() != name:
            raise TCParseError(
                'section {!r} closed by {!r}'.format(name, closing.text),
                closing.line, closing.col, closing.text, [repr(name)])
        return LocalInstanceBlock(name, tuple(items), tok.line)


def parse_file(text, path=None):
    """
    Parse a ``.tc`` source.

    Parameters
    ----------
    text: str
        Source text
    path: str, optional
        File name, kept for diagnostics

    Returns
    -------
    SourceFile

    Raises
    ------
    TCParseError
        With 1-based line and column, offending token and expected tokens.
    """
    parser = _Parser(tokenize(text))
    return SourceFile(parser.parse(), path)


def parse_term(text):
    """Parse a single closed term, e.g. a goal ``char_p (zmod 4) 4``."""
    parser = _Parser(tokenize(text))
    parser.scope = set()
    t = parser.term()
    if parser.peek() is not None:
        raise parser.error('expected end of term')
    return t


def _render_binder(b):
    if b.style == 'instance':
        if b.name is None:
            return '[{}]'.format(render(b.type))
        return '[{} : {}]'.format(b.name, render(b.type))
    return '{}{} : {}{}{}'.format(_OPEN[b.style], b.name,
                                  'out_param ' if b.out else '',
                                  render(b.type), _CLOSE[_OPEN[b.style]])


def _render_field(f):
    tag = ', data' if f.kind == 'data' else ''
    return '({} : {}{})'.format(f.name, render(f.type), tag)


def _render_assigns(assigns):
    if assigns is None:
        return 'opaque'
    if not assigns:
        return '{ }'
    return '{{ {} }}'.format(', '.join(
        '{} := {}'.format(name, render(t)) for name, t in assigns))


def _join(*parts):
    return ' '.join(p for p in parts if p)


def render_decl(d):
    """
    Render a command back to ``.tc`` syntax.

    Parameters
    ----------
    d: command
        Any command produced by :func:`parse_file`

    Returns
    -------
    str
        Source text; parsing it reproduces d.
    """
    if isinstance(d, SetOption):
        return 'set_option {} {}'.format(d.name, 'true' if d.value else 'false')
    if isinstance(d, ClassDecl):
        text = _join(d.keyword, d.name, *[_render_binder(b) for b in d.binders])
        if d.sort is not None:
            text = _join(text, ':', render(d.sort))
        if d.parents:
            text = _join(text, 'extends',
                         ', '.join(render(p) for p in d.parents))
        if d.fields:
            text = _join(text, ':=', *[_render_field(f) for f in d.fields])
        return text
    if isinstance(d, InstanceDecl):
        prio = '@[priority {}]'.format(d.priority) \
            if d.priority is not None else ''
        return _join(prio, 'instance', d.name,
                     *[_render_binder(b) for b in d.binders] +
                     [':', render(d.head), ':=', _render_assigns(d.assigns)])
    if isinstance(d, DefDecl):
        text = _join('def', d.name, *[_render_binder(b) for b in d.binders])
        if d.type is not None:
            text = _join(text, ':', render(d.type))
        body = render(d.body) if d.reducible else _render_assigns(d.body)
        return _join(text, ':=', body)
    if isinstance(d, AttributeDecl):
        return 'attribute [instance] {}'.format(d.name)
    if isinstance(d, SynthGoal):
        return '#synth {}'.format(render(d.goal))
    if isinstance(d, LetI):
        if d.value is not None:
            return 'letI := {}'.format(render(d.value))
        return 'letI {} : {}'.format(d.name, render(d.head))
    if isinstance(d, LocalInstanceBlock):
        lines = ['section {}'.format(d.name)]
        lines.extend(render_decl(item) for item in d.items)
        lines.append('end {}'.format(d.name))
        return '\n'.join(lines)
    raise TypeError('cannot render {!r}'.format(d))


def render_file(source):
    """Render every command of a SourceFile, one per line."""
    return ''.join(render_decl(c) + '\n' for c in source.commands)
