"""
Hierarchy module.

Builds the :class:`Environment` from parsed sources: desugars
``extends`` (old-structure flattening or new-structure embedding),
generates the parent-projection instances and keeps the per-class
candidate lists ordered by priority.

Contains
--------
* :class:`tcsynth.hierarchy.Environment`
* :class:`tcsynth.hierarchy.EnvironmentBuilder`
* :func:`tcsynth.hierarchy.flatten_class`
* :func:`tcsynth.hierarchy.embed_parents`
* :func:`tcsynth.hierarchy.generate_projections`
* :func:`tcsynth.hierarchy.ancestor_closure`
"""
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from autologging import logged

from ._exceptions import (TCAmbiguousField, TCArityError, TCConflictingField,
                          TCError, TCFrozenEnvironment, TCHierarchyError,
                          TCUnknownClass, TCUnknownField, TCUnknownParent)
from .parser import (AttributeDecl, Binder, ClassDecl, DefDecl, Field,
                     InstanceDecl, LetI, LocalInstanceBlock, PROJECTION,
                     SetOption, SynthGoal)
from .terms import Const, Definition, Term, Var, rename_vars

DEFAULT_PRIORITY = 1000
PROJECTION_PRIORITY = 100

OLD = 'old'
NEW = 'new'


@dataclass(frozen=True)
class LeafField:
    """Field of the flattened view, with the class that declared it."""

    name: str
    kind: str
    type: Term
    origin: str


@dataclass(frozen=True)
class GoalEntry:
    """A ``#synth`` goal with the local instances in scope."""

    goal: Term
    locals: Tuple[LetI, ...] = ()
    block: Optional[str] = None
    line: int = 0
    path: Optional[str] = field(default=None, compare=False)


@logged
class Environment(object):
    """
    Registry of classes, instances and definitions.

    Append-only while sources are processed, frozen before synthesis.

    Attributes
    ----------
    classes: dict
        Flattened :class:`ClassDecl` by name
    instances: dict
        Candidate lists by class name, priority descending then
        declaration order ascending
    defs: dict
        Reducible :class:`Definition` by name
    decls: dict
        Every instance-like declaration by name, including class-typed
        definitions not registered as instances
    leaves: dict
        Flattened :class:`LeafField` tuples by class name
    """

    def __init__(self, default_priority=DEFAULT_PRIORITY):
        self.default_priority = default_priority
        self.classes = {}
        self.instances = {}
        self.defs = {}
        self.decls = {}
        self.leaves = {}
        self._order = {}
        self._frozen = False

    @property
    def frozen(self):
        return self._frozen

    def freeze(self):
        self.instances = {
            name: tuple(cands)
            for name, cands in self.instances.items()
        }
        self._frozen = True
        self.__log.debug('Frozen environment: %s classes, %s instances',
                         len(self.classes), len(self._order))
        return self

    def _check_open(self):
        if self._frozen:
            raise TCFrozenEnvironment('environment is frozen')

    def _check_new_name(self, name):
        if name in self.classes or name in self.decls or name in self.defs:
            raise TCHierarchyError('duplicate declaration {}'.format(name))

    def add_class(self, decl, leaves):
        self._check_open()
        self._check_new_name(decl.name)
        self.classes[decl.name] = decl
        self.leaves[decl.name] = tuple(leaves)
        self.instances.setdefault(decl.name, [])

    def add_decl(self, decl):
        self._check_open()
        self._check_new_name(decl.name)
        self.decls[decl.name] = decl

    def add_instance(self, inst):
        """Register inst as a candidate, keeping the list sorted."""
        self._check_open()
        if inst.name not in self.decls:
            self.add_decl(inst)
        if inst.name in self._order:
            self.__log.warning('%s is already an instance', inst.name)
            return
        self._order[inst.name] = len(self._order)
        cands = self.instances[inst.head.name]
        cands.append(inst)
        cands.sort(key=lambda i: (-self.priority(i), self._order[i.name]))

    def add_def(self, defn):
        self._check_open()
        self._check_new_name(defn.name)
        self.defs[defn.name] = defn

    def priority(self, inst):
        return self.default_priority if inst.priority is None \
            else inst.priority

    def is_instance(self, name):
        return name in self._order

    def candidates(self, class_name):
        return self.instances.get(class_name, ())

    def lookup_class(self, name):
        try:
            return self.classes[name]
        except KeyError:
            raise TCUnknownClass('unknown class {}'.format(name))

    def leaf_fields(self, name):
        self.lookup_class(name)
        return self.leaves[name]

    def all_instances(self):
        """Registered instances in declaration order."""
        return sorted((self.decls[name] for name in self._order),
                      key=lambda i: self._order[i.name])


def _subst_params(decl, term):
    """Mapping from decl's param names to the arguments of term."""
    return dict(zip(decl.param_names, term.args))


def _parent_decl(parent, env):
    if not isinstance(parent, Const) or parent.name not in env.classes:
        raise TCUnknownParent('unknown parent {}'.format(
            getattr(parent, 'name', parent)))
    decl = env.classes[parent.name]
    if len(parent.args) != len(decl.param_names):
        raise TCArityError('{} expects {} arguments'.format(
            decl.name, len(decl.param_names)))
    return decl


def _parent_leaves(parent, env):
    decl = _parent_decl(parent, env)
    mapping = _subst_params(decl, parent)
    return decl, [
        replace(leaf, type=rename_vars(leaf.type, mapping))
        for leaf in env.leaves[decl.name]
    ]


def flatten_class(c, env):
    """
    Flatten an old-structure class.

    Parameters
    ----------
    c: ClassDecl
        Class whose parents are registered
    env: Environment
        Environment with the parents

    Returns
    -------
    ClassDecl
        Copy of c whose fields are the parents' flattened fields, in
        parent order, followed by its own; duplicates with identical type
        are skipped.

    Raises
    ------
    TCConflictingField
        Duplicate field name with a different type
    TCUnknownParent
        Parent class not registered
    """
    fields, seen = [], {}

    def merge(f):
        prior = seen.get(f.name)
        if prior is None:
            seen[f.name] = f
            fields.append(f)
        elif prior.type != f.type:
            raise TCConflictingField('field {} of {} conflicts'.format(
                f.name, c.name))

    for parent in c.parents:
        _, leaves = _parent_leaves(parent, env)
        for leaf in leaves:
            merge(Field(leaf.name, leaf.type, leaf.kind))
    for f in c.fields:
        merge(f)
    return replace(c, fields=tuple(fields), mode=OLD)


def embed_parents(c, env):
    """
    Embed the parents of a new-structure class.

    Each parent becomes a data field ``to_<parent>``; a parent sharing an
    ancestor with an earlier one only contributes its remaining leaf
    fields, copied flat.

    Parameters
    ----------
    c: ClassDecl
        Class whose parents are registered
    env: Environment
        Environment with the parents

    Returns
    -------
    ClassDecl

    Raises
    ------
    TCAmbiguousField
        Same leaf name reachable through unrelated parents
    """
    fields, seen, covered = [], {}, set()
    for parent in c.parents:
        decl, leaves = _parent_leaves(parent, env)
        ancestors = ancestor_closure(decl.name, env) | {decl.name}
        if ancestors & covered:
            for leaf in leaves:
                prior = seen.get(leaf.name)
                if prior is None:
                    seen[leaf.name] = leaf
                    fields.append(Field(leaf.name, leaf.type, leaf.kind))
                elif prior.origin != leaf.origin or prior.type != leaf.type:
                    raise TCAmbiguousField('field {} of {} is ambiguous'.format(
                        leaf.name, c.name))
        else:
            for leaf in leaves:
                if leaf.name in seen:
                    raise TCAmbiguousField('field {} of {} is ambiguous'.format(
                        leaf.name, c.name))
                seen[leaf.name] = leaf
            fields.append(Field('to_' + decl.name, parent, 'data'))
        covered |= ancestors
    names = set(seen) | set(f.name for f in fields)
    for f in c.fields:
        if f.name in names:
            raise TCAmbiguousField('field {} of {} is ambiguous'.format(
                f.name, c.name))
        names.add(f.name)
        fields.append(f)
    return replace(c, fields=tuple(fields), mode=NEW)


def leaf_fields_of(c, env):
    """Leaf view of a flattened or embedded class."""
    inherited, embedded = {}, {}
    for parent in c.parents:
        decl, leaves = _parent_leaves(parent, env)
        embedded['to_' + decl.name] = (parent, leaves)
        for leaf in leaves:
            inherited.setdefault(leaf.name, leaf)
    result = []
    for f in c.fields:
        if c.mode == NEW and f.name in embedded \
                and embedded[f.name][0] == f.type:
            result.extend(embedded[f.name][1])
        else:
            result.append(
                inherited.get(f.name, LeafField(f.name, f.kind, f.type,
                                                c.name)))
    return tuple(result)


def generate_projections(c):
    """
    Parent-projection instances of a class.

    Parameters
    ----------
    c: ClassDecl
        Registered class

    Returns
    -------
    list
        One :class:`InstanceDecl` ``<c>.to_<parent>`` per direct parent,
        at projection priority.
    """
    params = [
        Binder(b.name, b.type, 'implicit') for b in c.binders
        if b.style != 'instance'
    ]
    self_term = Const(c.name, tuple(Var(name) for name in c.param_names))
    return [
        InstanceDecl('{}.to_{}'.format(c.name, parent.name),
                     tuple(params) + (Binder(None, self_term, 'instance'), ),
                     parent,
                     priority=PROJECTION_PRIORITY,
                     provenance=PROJECTION,
                     line=c.line) for parent in c.parents
    ]


def ancestor_closure(c, env):
    """
    Transitive parents via ``extends``.

    Parameters
    ----------
    c: str
        Class name
    env: Environment

    Returns
    -------
    frozenset
        Ancestor names, binder-expressed superclasses excluded.
    """
    todo = [env.lookup_class(c)]
    found = set()
    while todo:
        decl = todo.pop()
        for parent in decl.parents:
            if parent.name not in found:
                found.add(parent.name)
                todo.append(env.lookup_class(parent.name))
    return frozenset(found)


@logged
class EnvironmentBuilder(object):
    """
    Process sources, in order, into one Environment.

    Parameters
    ----------
    default_priority: int, default=1000
        Priority of user instances without ``@[priority]``
    """

    def __init__(self, default_priority=DEFAULT_PRIORITY):
        self.env = Environment(default_priority)
        self.goals = []
        self.mode = NEW

    def add_file(self, source):
        """
        Register every command of a SourceFile.

        Errors are re-raised with ``line`` and ``path`` set.
        """
        self.mode = NEW
        self.__log.debug('Add %s commands from %s', len(source.commands),
                         source.path)
        for cmd in source.commands:
            try:
                self._command(cmd, source.path)
            except TCError as e:
                if e.line is None:
                    e.line = cmd.line
                e.path = source.path
                raise
        return self

    def build(self):
        """Freeze and return (environment, goals)."""
        self.env.freeze()
        return self.env, list(self.goals)

    # -- validation helpers
    def _check_arity(self, t):
        if not isinstance(t, Const):
            return
        env = self.env
        if t.name in env.classes:
            expected = len(env.classes[t.name].param_names)
        elif t.name in env.defs:
            expected = len(env.defs[t.name].params)
        else:
            expected = len(t.args)
        if expected != len(t.args):
            raise TCArityError('{} expects {} arguments, got {}'.format(
                t.name, expected, len(t.args)))
        for a in t.args:
            self._check_arity(a)

    def _check_class_app(self, t):
        if not isinstance(t, Const) or t.name not in self.env.classes \
                or not self.env.classes[t.name].is_class:
            raise TCUnknownClass('{} is not a class'.format(
                getattr(t, 'name', t)))
        self._check_arity(t)

    def _check_instance(self, inst):
        self._check_class_app(inst.head)
        for b in inst.binders:
            if b.style == 'instance':
                self._check_class_app(b.type)
            else:
                self._check_arity(b.type)
        if inst.assigns is not None:
            cls = self.env.classes[inst.head.name]
            known = set(leaf.name for leaf in self.env.leaves[cls.name])
            known.update(f.name for f in cls.fields)
            for name, value in inst.assigns:
                if name not in known:
                    raise TCUnknownField('{} has no field {}'.format(
                        cls.name, name))
                self._check_arity(value)

    # -- commands
    def _command(self, cmd, path):
        if isinstance(cmd, SetOption):
            if cmd.name == 'old_structure_cmd':
                self.mode = OLD if cmd.value else NEW
            else:
                self.__log.warning('Unknown option %s ignored', cmd.name)
        elif isinstance(cmd, ClassDecl):
            self._add_class(cmd)
        elif isinstance(cmd, InstanceDecl):
            self._check_instance(cmd)
            self.env.add_instance(cmd)
        elif isinstance(cmd, DefDecl):
            self._add_def(cmd)
        elif isinstance(cmd, AttributeDecl):
            decl = self.env.decls.get(cmd.name)
            if decl is None:
                raise TCHierarchyError('unknown declaration {}'.format(
                    cmd.name))
            self.env.add_instance(decl)
        elif isinstance(cmd, SynthGoal):
            self._check_class_app(cmd.goal)
            self.goals.append(GoalEntry(cmd.goal, line=cmd.line, path=path))
        elif isinstance(cmd, LocalInstanceBlock):
            self._add_block(cmd, path)
        else:
            raise TypeError('unknown command {!r}'.format(cmd))

    def _add_class(self, cmd):
        for parent in cmd.parents:
            _parent_decl(parent, self.env)
            self._check_arity(parent)
        for b in cmd.constraints:
            self._check_class_app(b.type)
        if self.mode == OLD:
            decl = flatten_class(cmd, self.env)
        else:
            decl = embed_parents(cmd, self.env)
        if len(set(f.name for f in decl.fields)) != len(decl.fields):
            raise TCConflictingField('duplicate field in {}'.format(decl.name))
        self.env.add_class(decl, leaf_fields_of(decl, self.env))
        self.__log.debug('Class %s (%s mode): %s', decl.name, decl.mode,
                         [f.name for f in decl.fields])
        if decl.is_class:
            for proj in generate_projections(decl):
                self.env.add_instance(proj)

    def _add_def(self, cmd):
        if cmd.reducible:
            params = tuple(b.name for b in cmd.binders if b.style != 'instance')
            self._check_arity(cmd.body)
            if any(name == cmd.name for name in _const_names(cmd.body)):
                raise TCHierarchyError('recursive definition {}'.format(
                    cmd.name))
            self.env.add_def(Definition(cmd.name, params, cmd.body))
        elif isinstance(cmd.type, Const) and cmd.type.name in self.env.classes:
            decl = InstanceDecl(cmd.name, cmd.binders, cmd.type,
                                assigns=cmd.body, line=cmd.line)
            self._check_instance(decl)
            self.env.add_decl(decl)
        else:
            self.__log.debug('Opaque definition %s not registered', cmd.name)

    def _add_block(self, cmd, path):
        lets = []
        for item in cmd.items:
            if isinstance(item, LetI):
                if item.value is not None:
                    if not isinstance(item.value, Const) \
                            or item.value.name not in self.env.decls:
                        raise TCHierarchyError(
                            'unknown declaration {}'.format(
                                getattr(item.value, 'name', item.value)))
                else:
                    self._check_class_app(item.head)
                lets.append(item)
            else:
                self._check_class_app(item.goal)
                self.goals.append(
                    GoalEntry(item.goal, tuple(lets), cmd.name, item.line,
                              path))


def _const_names(t):
    if isinstance(t, Const):
        yield t.name
        for a in t.args:
            for name in _const_names(a):
                yield name


def build_environment(sources, default_priority=DEFAULT_PRIORITY):
    """
    Build a frozen environment from parsed sources.

    Parameters
    ----------
    sources: list
        :class:`SourceFile` in import order
    default_priority: int, default=1000

    Returns
    -------
    env: Environment
    goals: list
        :class:`GoalEntry` in source order
    """
    builder = EnvironmentBuilder(default_priority)
    for source in sources:
        builder.add_file(source)
    return builder.build()
