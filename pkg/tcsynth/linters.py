"""
Linters module.

Static and search-based checks over a frozen environment: dangerous
instances, divergence (fails quickly), non definitionally equal diamonds
and blanket instances left at the default priority.

Contains
--------
* :class:`tcsynth.linters.LintFinding`
* :func:`tcsynth.linters.lint_dangerous`
* :func:`tcsynth.linters.lint_fails_quickly`
* :func:`tcsynth.linters.lint_diamond`
* :func:`tcsynth.linters.lint_blanket_priority`
* :func:`tcsynth.linters.lint_environment`
* :func:`tcsynth.linters.findings_to_json`
"""
import json
import logging
from dataclasses import dataclass, field

from ._exceptions import (TCDepthExceeded, TCFuelExhausted, TCKeyError,
                          TCNotFound)
from .parser import PROJECTION, USER
from .synth import (LocalInstance, LocalInstances, SynthConfig,
                    enumerate_solutions, infer_type, synthesize)
from .terms import (Const, Meta, Var, apply_subst, has_metas, metas_of,
                    normalize, rename_vars, render, unify, vars_of)

logger = logging.getLogger(__name__)

ERROR = 'error'
WARNING = 'warning'

LINTERS = ('dangerous', 'fails_quickly', 'diamond', 'blanket')


@dataclass(frozen=True)
class LintFinding:
    """
    Result of a linter on one declaration.

    Parameters
    ----------
    linter: str
        Linter name
    subject: str
        Declaration the finding is about
    severity: str
        error or warning
    message: str
        Human readable description
    data: dict
        Structured payload (undetermined variables, cycle path, fields)
    """

    linter: str
    subject: str
    severity: str
    message: str
    data: dict = field(default_factory=dict, hash=False)

    def as_dict(self):
        return {
            'linter': self.linter,
            'subject': self.subject,
            'severity': self.severity,
            'message': self.message,
            'data': self.data
        }


def _split_vars(t, cls):
    """Variable names of t at in- and out-positions of class cls."""
    ins, outs = [], []
    for i, arg in enumerate(t.args):
        target = outs if i in cls.out_positions else ins
        target.extend(v.name for v in vars_of(arg) if v.name not in target)
    return ins, outs


def lint_dangerous(inst, env):
    """
    Flag instances leaving binder variables undetermined.

    A variable is determined when it occurs at an in-position of the
    head, or at an out-position of an instance binder whose in-positions
    are all determined.

    Parameters
    ----------
    inst: InstanceDecl
        Registered instance
    env: Environment

    Returns
    -------
    list
        At most one :class:`LintFinding`.
    """
    head_cls = env.classes[inst.head.name]
    determined = set(_split_vars(inst.head, head_cls)[0])
    binders = [(b, env.classes[b.type.name]) for b in inst.instance_binders
               if isinstance(b.type, Const) and b.type.name in env.classes]
    changed = True
    while changed:
        changed = False
        for b, cls in binders:
            ins, outs = _split_vars(b.type, cls)
            if set(ins) <= determined and not set(outs) <= determined:
                determined.update(outs)
                changed = True
    undetermined = []
    for b, _ in binders:
        for v in vars_of(b.type):
            if v.name not in determined and v.name not in undetermined:
                undetermined.append(v.name)
    if not undetermined:
        return []
    return [
        LintFinding(
            'dangerous', inst.name, ERROR,
            'instance {} leaves {} undetermined'.format(
                inst.name, ', '.join(undetermined)),
            {'undetermined': undetermined})
    ]


def cycle_path(chain):
    """Class names along chain, cut after the first repeated class."""
    names = []
    for goal in chain:
        names.append(goal.name)
        if goal.name in names[:-1]:
            break
    return names


def _general_goal(cls):
    return Const(cls.name,
                 tuple(Var('x{}'.format(i + 1))
                       for i in range(len(cls.param_names))))


def _divergence(subject, goal, err):
    path = cycle_path(err.chain)
    return LintFinding(
        'fails_quickly', subject, ERROR,
        'synthesis of {} does not fail quickly ({}): {}'.format(
            render(goal), err.verdict, ' -> '.join(path)), {
                'goal': render(goal),
                'verdict': err.verdict,
                'path': path,
                'applied': err.stats.applied if err.stats else None
            })


def _fails_quickly(subject, goal, env, locals, budget):
    try:
        synthesize(goal, env, locals, budget)
    except TCNotFound:
        return []
    except (TCFuelExhausted, TCDepthExceeded) as e:
        logger.debug('%s diverges on %s', subject, render(goal))
        return [_divergence(subject, goal, e)]
    return []


def lint_fails_quickly(env, budget=None, per_instance=False):
    """
    Check that synthesis terminates within budget.

    Every class is queried with its maximally general goal ``C x1 .. xn``
    whose arguments are rigid variables, in an empty local context.

    Parameters
    ----------
    env: Environment
        Frozen environment
    budget: SynthConfig, optional
        Search budget
    per_instance: bool, default=False
        Also synthesize every instance binder of every user instance with
        the remaining binders as local hypotheses

    Returns
    -------
    list
        :class:`LintFinding`, one per diverging class (or instance
        binder) with the cycle path in ``data['path']``.
    """
    budget = budget if budget is not None else SynthConfig()
    findings = []
    for cls in env.classes.values():
        if cls.is_class:
            findings.extend(
                _fails_quickly(cls.name, _general_goal(cls), env, None,
                               budget))
    if not per_instance:
        return findings
    for inst in env.all_instances():
        if inst.provenance != USER:
            continue
        binders = inst.instance_binders
        for i, b in enumerate(binders):
            locals = LocalInstances(
                tuple(
                    LocalInstance(other.name or '_inst{}'.format(j),
                                  other.type)
                    for j, other in enumerate(binders) if j != i))
            for finding in _fails_quickly(inst.name, b.type, env, locals,
                                          budget):
                finding.data['binder'] = i
                findings.append(finding)
    return findings


def _leaf_names(term, env):
    ty = infer_type(term, env)
    if not isinstance(ty, Const) or ty.name not in env.leaves:
        return ()
    return tuple(leaf.name for leaf in env.leaves[ty.name])


def _instance_scope(term, decl, env):
    """Mapping of decl's variables for the instance term."""
    ty = infer_type(term, env)
    if ty is None:
        return {}
    start = max([m.id for m in metas_of(ty)], default=-1) + 1
    metas = {name: Meta(start + i) for i, name in enumerate(decl.variables)}
    s = unify(rename_vars(decl.head, metas), ty, env)
    if s is None:
        return {}
    return {name: apply_subst(s, m) for name, m in metas.items()}


def _evaluate(t, scope, fillers, env):
    if isinstance(t, Var):
        if t.name in fillers:
            return fillers[t.name]
        return scope.get(t.name, t)
    if not isinstance(t, Const):
        return t
    if len(t.args) == 1 and isinstance(t.args[0], Var) \
            and t.args[0].name in fillers:
        filler = fillers[t.args[0].name]
        if t.name in _leaf_names(filler, env):
            return field_value(filler, t.name, env)
    return Const(t.name, tuple(_evaluate(a, scope, fillers, env)
                               for a in t.args))


def field_value(term, name, env):
    """
    Value of the data field name in the instance term.

    Assigned fields are evaluated with ``f h`` (``h`` a named instance
    binder) read as the field f of h's filler; projections and
    ``to_<parent>`` assignments are followed to the instance providing
    the field. Opaque fields evaluate to ``<instance>.<field>`` applied to
    the arguments of the instance term.
    """
    opaque = Const('{}.{}'.format(term.name, name), term.args)
    decl = env.decls.get(getattr(term, 'name', None))
    if decl is None:
        return opaque
    if decl.provenance == PROJECTION:
        return field_value(term.args[-1], name, env)
    assigns = decl.assign_map
    fillers = {
        b.name: filler
        for b, filler in zip(decl.binders, term.args)
        if b.name and b.style == 'instance'
    }
    if name in assigns:
        return _evaluate(assigns[name], _instance_scope(term, decl, env),
                         fillers, env)
    for key, value in assigns.items():
        if not key.startswith('to_'):
            continue
        if isinstance(value, Var) and value.name in fillers:
            parent = fillers[value.name]
        elif isinstance(value, Const) and value.name in env.decls:
            parent = value
        else:
            continue
        if name in _leaf_names(parent, env):
            return field_value(parent, name, env)
    return opaque


def _data_fields(term, env):
    ty = infer_type(term, env)
    leaves = env.leaves.get(getattr(ty, 'name', None), ())
    return [(leaf.name,
             normalize(field_value(term, leaf.name, env), env))
            for leaf in leaves if leaf.kind == 'data']


def lint_diamond(env, goal, cfg=None):
    """
    Compare the data fields of every pair of solutions of goal.

    Proof fields are skipped; data fields are compared after evaluation
    and normalization.

    Parameters
    ----------
    env: Environment
        Frozen environment
    goal: Term
        Meta-free class goal
    cfg: SynthConfig, optional
        Enumeration budget

    Returns
    -------
    list
        One error finding per pair of solutions with differing data
        fields, plus a warning when the enumeration was cut off.
    """
    if has_metas(goal):
        raise ValueError('diamond goal {} has metavariables'.format(
            render(goal)))
    results, complete = enumerate_solutions(goal, env, cfg)
    findings = []
    if not complete:
        findings.append(
            LintFinding(
                'diamond', goal.name, WARNING,
                'enumeration of {} cut off after {} solutions'.format(
                    render(goal), len(results)), {
                        'goal': render(goal),
                        'solutions': len(results),
                        'verdict': 'budget_exceeded'
                    }))
    values = [dict(_data_fields(r.term, env)) for r in results]
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            names = list(values[i])
            names.extend(n for n in values[j] if n not in values[i])
            differing = [
                n for n in names if values[i].get(n) != values[j].get(n)
            ]
            if not differing:
                continue
            first, second = render(results[i].term), render(results[j].term)
            findings.append(
                LintFinding(
                    'diamond', results[i].term.name, ERROR,
                    '{} and {} differ on {} for {}'.format(
                        first, second, ', '.join(differing), render(goal)),
                    {
                        'goal': render(goal),
                        'instances': [first, second],
                        'fields': differing
                    }))
    return findings


def lint_blanket_priority(env):
    """
    Warn for blanket instances at or above the default priority.

    A user instance is blanket when the in-position arguments of its head
    are pairwise distinct variables.
    """
    findings = []
    for inst in env.all_instances():
        if inst.provenance != USER:
            continue
        cls = env.classes[inst.head.name]
        ins = [
            a for i, a in enumerate(inst.head.args)
            if i not in cls.out_positions
        ]
        blanket = ins and all(isinstance(a, Var) for a in ins) \
            and len(set(ins)) == len(ins)
        priority = env.priority(inst)
        if blanket and priority >= env.default_priority:
            findings.append(
                LintFinding(
                    'blanket', inst.name, WARNING,
                    'blanket instance {} has priority {}'.format(
                        inst.name, priority), {'priority': priority}))
    return findings


def lint_environment(env, goals=(), linters=None, cfg=None,
                     per_instance=False):
    """
    Run a selection of linters.

    Parameters
    ----------
    env: Environment
    goals: list
        :class:`GoalEntry`; the Meta-free ones without local instances
        are checked for diamonds
    linters: list, optional
        Linter names, all of :data:`LINTERS` by default
    cfg: SynthConfig, optional
    per_instance: bool, default=False

    Returns
    -------
    list
        Findings, grouped by linter in :data:`LINTERS` order.
    """
    linters = LINTERS if linters is None else tuple(linters)
    for name in linters:
        if name not in LINTERS:
            raise TCKeyError('unknown linter {}'.format(name))
    findings = []
    if 'dangerous' in linters:
        for inst in env.all_instances():
            findings.extend(lint_dangerous(inst, env))
    if 'fails_quickly' in linters:
        findings.extend(lint_fails_quickly(env, cfg, per_instance))
    if 'diamond' in linters:
        seen = []
        for entry in goals:
            if entry.locals or has_metas(entry.goal) or entry.goal in seen:
                continue
            seen.append(entry.goal)
            findings.extend(lint_diamond(env, entry.goal, cfg))
    if 'blanket' in linters:
        findings.extend(lint_blanket_priority(env))
    logger.debug('%s findings from %s', len(findings), linters)
    return findings


def findings_to_json(findings):
    """Serialize findings to a JSON array with stable key order."""
    return json.dumps([f.as_dict() for f in findings], indent=2,
                      ensure_ascii=False)
