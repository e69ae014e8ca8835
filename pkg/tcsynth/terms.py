"""
Terms module.

First-order terms used for class goals, instance heads and field values,
together with substitutions, head reduction and unification.

Contains
--------
* :class:`tcsynth.terms.Const`
* :class:`tcsynth.terms.Var`
* :class:`tcsynth.terms.Meta`
* :class:`tcsynth.terms.NatLit`
* :class:`tcsynth.terms.Substitution`
* :class:`tcsynth.terms.Definition`
* :func:`tcsynth.terms.whnf`
* :func:`tcsynth.terms.unify`
* :func:`tcsynth.terms.apply_subst`
* :func:`tcsynth.terms.term_size`
"""
import operator
from dataclasses import dataclass, field
from typing import Mapping, Tuple, Union

# built-in arithmetic heads on numeric literals
ARITH = {'add': operator.add, 'mul': operator.mul}
INFIX = {'add': '+', 'mul': '*'}

# guard for definitions unfolding into themselves
_MAX_UNFOLD = 256


@dataclass(frozen=True)
class Const:
    """Constant head applied to a (possibly empty) tuple of arguments."""

    name: str
    args: Tuple['Term', ...] = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, 'args', tuple(self.args))


@dataclass(frozen=True)
class Var:
    """Rigid variable, bound by a declaration binder."""

    name: str


@dataclass(frozen=True)
class Meta:
    """Metavariable, solved by unification."""

    id: int


@dataclass(frozen=True)
class NatLit:
    """Numeric literal."""

    value: int


Term = Union[Const, Var, Meta, NatLit]


@dataclass(frozen=True)
class Definition:
    """Reducible definition ``name params := body`` unfolded by whnf."""

    name: str
    params: Tuple[str, ...]
    body: Term


@dataclass(frozen=True)
class Substitution:
    """
    Finite map from Meta ids to terms.

    Bindings may be chained (``?m0 -> ?m1``); :func:`apply_subst`
    resolves chains to a fixpoint.
    """

    bindings: Mapping[int, Term] = field(default_factory=dict)

    def lookup(self, meta):
        return self.bindings.get(meta.id)

    def __len__(self):
        return len(self.bindings)

    def __contains__(self, meta):
        return meta.id in self.bindings


def walk(t, bindings):
    """Dereference a chain of bound metavariables."""
    while isinstance(t, Meta) and t.id in bindings:
        t = bindings[t.id]
    return t


def resolve(t, bindings):
    """Replace every bound Meta of t, recursively."""
    t = walk(t, bindings)
    if isinstance(t, Const) and t.args:
        return Const(t.name, tuple(resolve(a, bindings) for a in t.args))
    return t


def apply_subst(s, t):
    """
    Apply a substitution to a term.

    Parameters
    ----------
    s: Substitution
        Substitution to apply
    t: Term
        Input term

    Returns
    -------
    Term
        t with every bound metavariable replaced until no bound
        metavariable remains.
    """
    if not len(s):
        return t
    return resolve(t, s.bindings)


def term_size(t):
    """Node count: 1 for atoms, 1 + size of the arguments for Const."""
    if isinstance(t, Const):
        return 1 + sum(term_size(a) for a in t.args)
    return 1


def _definition(env, name):
    if env is None:
        return None
    return env.defs.get(name)


def rename_vars(t, mapping):
    """Replace the Vars in mapping, leaving the others untouched."""
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Const) and t.args:
        return Const(t.name, tuple(rename_vars(a, mapping) for a in t.args))
    return t


def _collect(t, kind, acc):
    if isinstance(t, kind):
        if t not in acc:
            acc.append(t)
    elif isinstance(t, Const):
        for a in t.args:
            _collect(a, kind, acc)
    return acc


def metas_of(t):
    """Metas of t in first-occurrence order."""
    return _collect(t, Meta, [])


def vars_of(t):
    """Vars of t in first-occurrence order."""
    return _collect(t, Var, [])


def has_metas(t):
    if isinstance(t, Meta):
        return True
    if isinstance(t, Const):
        return any(has_metas(a) for a in t.args)
    return False


def normalize_metas(t):
    """Renumber Metas by first occurrence (table keys)."""
    mapping = {}

    def _norm(u):
        if isinstance(u, Meta):
            if u.id not in mapping:
                mapping[u.id] = Meta(len(mapping))
            return mapping[u.id]
        if isinstance(u, Const) and u.args:
            return Const(u.name, tuple(_norm(a) for a in u.args))
        return u

    return _norm(t)


def _arith(t, env):
    if len(t.args) != 2:
        return None
    a, b = (whnf(x, env) for x in t.args)
    if isinstance(a, NatLit) and isinstance(b, NatLit):
        return NatLit(ARITH[t.name](a.value, b.value))
    return None


def whnf(t, env=None):
    """
    Weak head normal form.

    ``add``/``mul`` applied to arguments that reduce to literals become a
    literal; registered reducible definitions unfold at the head.

    Parameters
    ----------
    t: Term
        Input term
    env: Environment, optional
        Environment providing the reducible definitions

    Returns
    -------
    Term
        Head-normal term (t itself when nothing reduces).
    """
    for _ in range(_MAX_UNFOLD):
        if not isinstance(t, Const):
            return t
        if t.name in ARITH:
            lit = _arith(t, env)
            return t if lit is None else lit
        defn = _definition(env, t.name)
        if defn is None or len(defn.params) != len(t.args):
            return t
        t = rename_vars(defn.body, dict(zip(defn.params, t.args)))
    return t


def normalize(t, env=None):
    """whnf applied to every subterm."""
    t = whnf(t, env)
    if isinstance(t, Const) and t.args:
        return Const(t.name, tuple(normalize(a, env) for a in t.args))
    return t


def _step(t, env, bindings):
    """One head-reduction step of a Const, None when stuck."""
    if t.name in ARITH:
        return _arith(resolve(t, bindings), env)
    defn = _definition(env, t.name)
    if defn is None or len(defn.params) != len(t.args):
        return None
    return rename_vars(defn.body, dict(zip(defn.params, t.args)))


def occurs(meta, t, bindings):
    t = walk(t, bindings)
    if isinstance(t, Meta):
        return t.id == meta.id
    if isinstance(t, Const):
        return any(occurs(meta, a, bindings) for a in t.args)
    return False


def undo(bindings, trail, mark):
    """Roll back the bindings recorded in trail after mark."""
    while len(trail) > mark:
        del bindings[trail.pop()]


def _bind(meta, t, bindings, trail):
    if occurs(meta, t, bindings):
        return False
    bindings[meta.id] = t
    trail.append(meta.id)
    return True


def unify_into(a, b, env, bindings, trail, fuel=_MAX_UNFOLD):
    """
    Unify in place.

    New bindings are written into ``bindings`` and their ids pushed on
    ``trail``; on failure the caller rolls back with :func:`undo`.
    """
    a = walk(a, bindings)
    b = walk(b, bindings)
    if isinstance(a, Meta):
        if isinstance(b, Meta) and a.id == b.id:
            return True
        return _bind(a, b, bindings, trail)
    if isinstance(b, Meta):
        return _bind(b, a, bindings, trail)
    if isinstance(a, NatLit) and isinstance(b, NatLit):
        return a.value == b.value
    if isinstance(a, Var) and isinstance(b, Var):
        return a.name == b.name
    if (isinstance(a, Const) and isinstance(b, Const) and a.name == b.name
            and len(a.args) == len(b.args)):
        mark = len(trail)
        if all(
                unify_into(x, y, env, bindings, trail, fuel)
                for x, y in zip(a.args, b.args)):
            return True
        undo(bindings, trail, mark)
    if fuel <= 0:
        return False
    ra = _step(a, env, bindings) if isinstance(a, Const) else None
    rb = _step(b, env, bindings) if isinstance(b, Const) else None
    if ra is None and rb is None:
        return False
    return unify_into(a if ra is None else ra, b if rb is None else rb, env,
                      bindings, trail, fuel - 1)


def unify(t1, t2, env=None, s=None):
    """
    First-order unification up to head reduction.

    Parameters
    ----------
    t1, t2: Term
        Terms to unify
    env: Environment, optional
        Environment with reducible definitions
    s: Substitution, optional
        Substitution to extend

    Returns
    -------
    Substitution or None
        Extended substitution, None on failure.
    """
    bindings = dict(s.bindings) if s is not None else {}
    if unify_into(t1, t2, env, bindings, []):
        return Substitution(bindings)
    return None


def render(t, atom=False):
    """Render a term in ``.tc`` surface syntax."""
    if isinstance(t, Const):
        if not t.args:
            return t.name
        if t.name in INFIX and len(t.args) == 2:
            text = '{} {} {}'.format(
                render(t.args[0], True), INFIX[t.name],
                render(t.args[1], True))
        else:
            text = ' '.join([t.name] + [render(a, True) for a in t.args])
        return '({})'.format(text) if atom else text
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Meta):
        return '?m{}'.format(t.id)
    return str(t.value)
