"""
Synthesis module.

Depth-first backtracking instance synthesis: candidates are the local
instances followed by the class's global candidate list; a candidate's
head is unified with the subgoal and its instance binders are solved
recursively, left to right. Out-params are replaced by fresh
metavariables before each subgoal is searched. An optional tabled mode
memoizes subgoals keyed by their normalized syntactic form and cuts
cycles through in-progress subgoals.

Contains
--------
* :class:`tcsynth.synth.SynthConfig`
* :class:`tcsynth.synth.SynthResult`
* :class:`tcsynth.synth.LocalInstances`
* :class:`tcsynth.synth.Synthesizer`
* :func:`tcsynth.synth.prepare_goal`
* :func:`tcsynth.synth.synthesize`
* :func:`tcsynth.synth.check_result`
"""
import collections
import sys
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from autologging import logged

from ._exceptions import (TCArityError, TCDepthExceeded, TCFuelExhausted,
                          TCIllFormedGoal, TCNotFound, TCUnknownClass)
from .terms import (Const, Meta, Term, has_metas, metas_of, normalize_metas,
                    rename_vars, render, resolve, term_size, undo, unify_into)


def namedtuple_with_defaults(typename, field_names, default_values=()):
    """
    Create a namedtuple with default values.

    Parameters
    ----------
    typename: str
        Name of the namedtuple
    field_names: list
        List of names of the fields
    default_values: list, dict
        Default values

    Returns
    -------
    namedtuple
    """
    T = collections.namedtuple(typename, field_names)
    T.__new__.__defaults__ = (None, ) * len(T._fields)
    if isinstance(default_values, collections.abc.Mapping):
        prototype = T(**default_values)
    else:
        prototype = T(*default_values)
    T.__new__.__defaults__ = tuple(prototype)
    return T


_SynthConfig = namedtuple_with_defaults(
    'SynthConfig', ['fuel', 'max_depth', 'tabled'], {
        'fuel': 20000,
        'max_depth': 64,
        'tabled': False
    })


class SynthConfig(_SynthConfig):
    """
    Search budget.

    Parameters
    ----------
    fuel: int, default=20000
        Total number of candidate applications
    max_depth: int, default=64
        Maximum subgoal depth, the root goal being at depth 1
    tabled: bool, default=False
        Memoize subgoals and cut cycles
    """

    __slots__ = ()

    def __new__(cls, *args, **kwargs):
        self = super(SynthConfig, cls).__new__(cls, *args, **kwargs)
        if self.fuel < 1:
            raise ValueError('fuel must be >= 1, got {}'.format(self.fuel))
        if self.max_depth < 1:
            raise ValueError('max_depth must be >= 1, got {}'.format(
                self.max_depth))
        return self


@dataclass
class SynthStats:
    """Search statistics of one synthesis call."""

    applied: int = 0
    unified: int = 0
    backtracks: int = 0
    max_depth: int = 0
    size: int = 0

    def as_dict(self):
        return {
            'applied': self.applied,
            'unified': self.unified,
            'backtracks': self.backtracks,
            'max_depth': self.max_depth,
            'size': self.size
        }


@dataclass(frozen=True)
class SynthResult:
    """
    Solution of a goal.

    ``term`` is the instance constant applied to the terms filling its
    binders, in binder order: the value of each variable binder and the
    synthesized instance of each instance binder. ``goal`` is the goal
    with out-params instantiated.
    """

    term: Term
    stats: SynthStats
    goal: Term


@dataclass(frozen=True)
class LocalInstance:
    """Local instance; ``value`` is None for a hypothesis."""

    name: str
    head: Term
    value: Optional[Term] = None

    @property
    def term(self):
        return Const(self.name) if self.value is None else self.value


@dataclass(frozen=True)
class LocalInstances:
    """Ordered local instances, tried before the global candidates."""

    items: Tuple[LocalInstance, ...] = ()

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def extend(self, local):
        return LocalInstances(self.items + (local, ))

    def lookup(self, term):
        for local in self.items:
            if local.term == term:
                return local
        return None


class _OutOfFuel(Exception):
    pass


def _next_meta_id(*terms):
    return max([m.id for t in terms for m in metas_of(t)], default=-1) + 1


def _goal_class(goal, env):
    if not isinstance(goal, Const):
        raise TCUnknownClass('goal {} is not a class application'.format(
            render(goal)))
    return env.lookup_class(goal.name)


def prepare_goal(goal, env, next_id=None):
    """
    Replace the out-param positions of a goal by fresh metavariables.

    Parameters
    ----------
    goal: Term
        Class application
    env: Environment
    next_id: int, optional
        First metavariable id; after the goal's own Metas by default

    Returns
    -------
    goal: Term
        Rewritten goal
    metas: list
        The fresh metavariables

    Raises
    ------
    TCUnknownClass
        The goal's head is not a registered class
    """
    cls = _goal_class(goal, env)
    if next_id is None:
        next_id = _next_meta_id(goal)
    args = list(goal.args)
    metas = []
    for i in cls.out_positions:
        if i < len(args):
            args[i] = Meta(next_id + len(metas))
            metas.append(args[i])
    return Const(goal.name, tuple(args)), metas


@logged
class Synthesizer(object):
    """
    Search state of one synthesis call.

    Parameters
    ----------
    env: Environment
        Frozen environment, shared read-only
    locals: LocalInstances, optional
        Local instances
    cfg: SynthConfig, optional
        Search budget
    """

    # generator frames used per subgoal level
    _FRAMES_PER_LEVEL = 8

    def __init__(self, env, locals=None, cfg=None):
        self.env = env
        self.locals = locals if locals is not None else LocalInstances()
        self.cfg = cfg if cfg is not None else SynthConfig()
        self.stats = SynthStats()
        self.bindings = {}
        self.trail = []
        self.chain = ()
        self.depth_cuts = 0
        self.cycle_cuts = 0
        self._next = 0
        self._stack = []
        self._in_progress = collections.Counter()
        self._solved = {}
        self._failed = set()
        self._compiled = {}
        limit = self.cfg.max_depth * self._FRAMES_PER_LEVEL + 500
        if sys.getrecursionlimit() < limit:
            sys.setrecursionlimit(limit)

    # -- helpers
    def _fresh(self):
        meta = Meta(self._next)
        self._next += 1
        return meta

    def _spend(self):
        if self.stats.applied >= self.cfg.fuel:
            raise _OutOfFuel()
        self.stats.applied += 1

    def _compile(self, inst):
        try:
            return self._compiled[inst.name]
        except KeyError:
            compiled = (inst.variables, inst.head,
                        tuple(b.type for b in inst.instance_binders),
                        tuple(None if b.style == 'instance' else b.name
                              for b in inst.binders))
            self._compiled[inst.name] = compiled
            return compiled

    def _rename(self, inst, mapping=None):
        """Head, instance binder types and argument slots of inst."""
        variables, head, binders, slots = self._compile(inst)
        mapping = dict(mapping or {})
        for name in variables:
            if name not in mapping:
                mapping[name] = self._fresh()
        return (rename_vars(head, mapping),
                [rename_vars(b, mapping) for b in binders],
                [None if name is None else mapping[name] for name in slots])

    def _instance_term(self, name, slots, fillers):
        """name applied to its binder values, fillers in the None slots."""
        fillers = iter(fillers)
        args = tuple(next(fillers) if slot is None else slot
                     for slot in slots)
        return resolve(Const(name, args), self.bindings)

    def _prepare(self, goal, cls):
        args = list(goal.args)
        for i in cls.out_positions:
            args[i] = self._fresh()
        return Const(goal.name, tuple(args))

    def _validate(self, goal):
        if not isinstance(goal, Const) or goal.name not in self.env.classes \
                or not self.env.classes[goal.name].is_class:
            raise TCIllFormedGoal('{} is not a class goal'.format(
                render(goal)), self.stats)
        cls = self.env.classes[goal.name]
        if len(goal.args) != len(cls.param_names):
            raise TCIllFormedGoal('{} expects {} arguments'.format(
                cls.name, len(cls.param_names)), self.stats)
        for i, arg in enumerate(goal.args):
            if i not in cls.out_positions and has_metas(arg):
                raise TCIllFormedGoal(
                    'metavariable in in-position {} of {}'.format(
                        i, render(goal)), self.stats)
        return cls

    def _push(self, goal, key, depth):
        self._stack.append(goal)
        self._in_progress[key] += 1
        if depth > self.stats.max_depth:
            self.stats.max_depth = depth
        if len(self._stack) > len(self.chain):
            self.chain = tuple(self._stack)

    def _pop(self, key):
        self._stack.pop()
        self._in_progress[key] -= 1

    def _candidates(self, goal):
        for local in self.locals:
            if isinstance(local.head, Const) and local.head.name == goal.name:
                yield local
        for inst in self.env.candidates(goal.name):
            yield inst

    # -- search
    def _solve(self, goal, depth):
        if depth > self.cfg.max_depth:
            self.depth_cuts += 1
            return
        goal = resolve(goal, self.bindings)
        cls = self.env.classes[goal.name]
        if depth == 1 or not cls.out_positions:
            for term in self._search(goal, depth):
                yield term
            return
        prepared = self._prepare(goal, cls)
        for term in self._search(prepared, depth):
            mark = len(self.trail)
            if unify_into(goal, prepared, self.env, self.bindings, self.trail):
                yield term
            undo(self.bindings, self.trail, mark)

    def _search(self, goal, depth):
        key = normalize_metas(goal)
        ground = not has_metas(goal)
        tabled = self.cfg.tabled
        if tabled:
            if self._in_progress[key]:
                self.cycle_cuts += 1
                return
            if ground and key in self._solved:
                yield self._solved[key]
                return
            if key in self._failed:
                return
        cuts = self.depth_cuts + self.cycle_cuts
        found = False
        self._push(goal, key, depth)
        for cand in self._candidates(goal):
            for term in self._apply(cand, goal, depth):
                found = True
                self._pop(key)
                if tabled and ground:
                    # first answer of a ground subgoal is final
                    self._solved[key] = term
                    yield term
                    return
                yield term
                self._push(goal, key, depth)
        self._pop(key)
        if tabled and not found and cuts == self.depth_cuts + self.cycle_cuts:
            self._failed.add(key)

    def _apply(self, cand, goal, depth):
        self._spend()
        mark = len(self.trail)
        if isinstance(cand, LocalInstance):
            if unify_into(cand.head, goal, self.env, self.bindings,
                          self.trail):
                self.stats.unified += 1
                yield cand.term
        else:
            head, binders, slots = self._rename(cand)
            if unify_into(head, goal, self.env, self.bindings, self.trail):
                self.stats.unified += 1
                for fillers in self._solve_binders(binders, depth + 1):
                    yield self._instance_term(cand.name, slots, fillers)
        undo(self.bindings, self.trail, mark)
        self.stats.backtracks += 1

    def _solve_binders(self, binders, depth):
        """All filler tuples of binders, solved left to right."""
        if not binders:
            yield ()
            return
        n = len(binders)
        fillers = [None] * n
        gens = [self._solve(binders[0], depth)]
        while gens:
            i = len(gens) - 1
            try:
                fillers[i] = next(gens[i])
            except StopIteration:
                gens.pop()
                continue
            if i + 1 == n:
                yield tuple(fillers)
            else:
                gens.append(self._solve(binders[i + 1], depth))

    # -- entry points
    def _failure(self, goal):
        if self.depth_cuts:
            return TCDepthExceeded(
                'no instance of {} within depth {}'.format(
                    render(goal), self.cfg.max_depth), self.stats, self.chain)
        return TCNotFound('no instance of {}'.format(render(goal)),
                          self.stats, self.chain)

    def _out_of_fuel(self, goal):
        self.__log.debug('Fuel exhausted on %s', render(goal))
        return TCFuelExhausted(
            'fuel exhausted on {} after {} applications'.format(
                render(goal), self.stats.applied), self.stats, self.chain)

    def run(self, goal):
        """
        Synthesize the first solution of goal.

        Returns
        -------
        SynthResult

        Raises
        ------
        TCNotFound, TCFuelExhausted, TCDepthExceeded, TCIllFormedGoal
        """
        cls = self._validate(goal)
        self._next = _next_meta_id(goal)
        prepared = self._prepare(goal, cls)
        self.__log.debug('Synthesize %s', render(prepared))
        try:
            for term in self._solve(prepared, 1):
                self.stats.size = term_size(term)
                return SynthResult(term, replace(self.stats),
                                   resolve(prepared, self.bindings))
        except _OutOfFuel:
            raise self._out_of_fuel(goal)
        raise self._failure(goal)

    def solutions(self, goal):
        """
        Enumerate every solution of goal by exhaustive backtracking.

        Returns
        -------
        results: list
            :class:`SynthResult` deduplicated by term, in search order
        complete: bool
            False when the enumeration was cut by fuel or depth
        """
        cls = self._validate(goal)
        self._next = _next_meta_id(goal)
        prepared = self._prepare(goal, cls)
        results, seen = [], set()
        complete = True
        try:
            for term in self._solve(prepared, 1):
                if term in seen:
                    continue
                seen.add(term)
                stats = replace(self.stats, size=term_size(term))
                results.append(
                    SynthResult(term, stats, resolve(prepared, self.bindings)))
        except _OutOfFuel:
            complete = False
        if self.depth_cuts:
            complete = False
        return results, complete

    def apply_declaration(self, decl, args):
        """
        Solve the instance binders of decl applied to explicit args.

        Returns
        -------
        term: Term
            decl applied to the values of its binders
        head: Term
            Instantiated head of decl
        """
        explicit = [b.name for b in decl.binders if b.style == 'explicit']
        if len(explicit) != len(args):
            raise TCArityError('{} expects {} explicit arguments'.format(
                decl.name, len(explicit)))
        self._next = _next_meta_id(*args)
        head, binders, slots = self._rename(decl, dict(zip(explicit, args)))
        try:
            for fillers in self._solve_binders(binders, 1):
                return (self._instance_term(decl.name, slots, fillers),
                        resolve(head, self.bindings))
        except _OutOfFuel:
            raise self._out_of_fuel(head)
        raise self._failure(head)


def synthesize(goal, env, locals=None, cfg=None):
    """
    Synthesize an instance of goal.

    Parameters
    ----------
    goal: Term
        Class application; metavariables only in out positions
    env: Environment
        Frozen environment
    locals: LocalInstances, optional
        Local instances, tried before the global candidates
    cfg: SynthConfig, optional
        Search budget

    Returns
    -------
    SynthResult

    Raises
    ------
    TCNotFound
        Search space exhausted
    TCFuelExhausted
        Application budget hit
    TCDepthExceeded
        No solution and at least one branch cut at max_depth
    TCIllFormedGoal
        Goal is not a class application or has metavariables in
        in-positions
    """
    return Synthesizer(env, locals, cfg).run(goal)


def enumerate_solutions(goal, env, cfg=None, locals=None):
    """All solutions of goal, see :meth:`Synthesizer.solutions`."""
    return Synthesizer(env, locals, cfg).solutions(goal)


def _infer(term, env, locals, fresh, bindings, trail):
    if not isinstance(term, Const):
        return None
    local = locals.lookup(term)
    if local is not None:
        return local.head
    decl = env.decls.get(term.name)
    if decl is None:
        return None
    if len(decl.binders) != len(term.args):
        return None
    mapping = {name: fresh() for name in decl.variables}
    for b, arg in zip(decl.binders, term.args):
        if b.style != 'instance':
            if not unify_into(mapping[b.name], arg, env, bindings, trail):
                return None
            continue
        ty = _infer(arg, env, locals, fresh, bindings, trail)
        if ty is None or not unify_into(
                rename_vars(b.type, mapping), ty, env, bindings, trail):
            return None
    return rename_vars(decl.head, mapping)


def _allocator(start):
    counter = [start]

    def fresh():
        counter[0] += 1
        return Meta(counter[0] - 1)

    return fresh


def infer_type(term, env, locals=None):
    """
    Class application an instance term inhabits.

    Parameters
    ----------
    term: Term
        Instance term as returned in :class:`SynthResult`
    env: Environment
    locals: LocalInstances, optional

    Returns
    -------
    Term or None
        None when the term is not well-formed.
    """
    locals = locals if locals is not None else LocalInstances()
    bindings = {}
    ty = _infer(term, env, locals, _allocator(0), bindings, [])
    return None if ty is None else resolve(ty, bindings)


def check_result(goal, r, env, locals=None):
    """
    Soundness check of a synthesis result.

    True iff instantiating the head declaration of ``r.term`` with its
    arguments yields a class application that unifies with goal
    (out-param positions of goal are free).
    """
    try:
        prepared, _ = prepare_goal(goal, env)
    except TCUnknownClass:
        return False
    locals = locals if locals is not None else LocalInstances()
    bindings, trail = {}, []
    fresh = _allocator(_next_meta_id(prepared))
    ty = _infer(r.term, env, locals, fresh, bindings, trail)
    return ty is not None and unify_into(ty, prepared, env, bindings, trail)


def make_local_instances(items, env, cfg=None):
    """
    Resolve ``letI`` items into local instances.

    Hypotheses are taken as given; applications of a declaration get
    their instance binders synthesized with the locals introduced so far.

    Parameters
    ----------
    items: list
        :class:`tcsynth.parser.LetI` items in order
    env: Environment
    cfg: SynthConfig, optional

    Returns
    -------
    LocalInstances
    """
    locals = LocalInstances()
    for item in items:
        if item.value is None:
            locals = locals.extend(LocalInstance(item.name, item.head))
            continue
        decl = env.decls[item.value.name]
        term, head = Synthesizer(env, locals, cfg).apply_declaration(
            decl, item.value.args)
        locals = locals.extend(LocalInstance(render(item.value), head, term))
    return locals
