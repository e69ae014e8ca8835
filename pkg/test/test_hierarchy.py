"""Test hierarchy."""
import pytest

from tcsynth._exceptions import (TCAmbiguousField, TCArityError,
                                 TCConflictingField, TCFrozenEnvironment,
                                 TCHierarchyError, TCUnknownClass,
                                 TCUnknownField, TCUnknownParent)
from tcsynth.corpus import corpus_file, load_environment
from tcsynth.hierarchy import (DEFAULT_PRIORITY, NEW, OLD, PROJECTION_PRIORITY,
                               EnvironmentBuilder, ancestor_closure,
                               build_environment, embed_parents, flatten_class,
                               generate_projections)
from tcsynth.parser import PROJECTION, InstanceDecl, parse_file
from tcsynth.terms import Const, Var

monoid_hierarchy = """
class has_mul (α : Type) := (mul : binop α, data)
class has_one (α : Type) := (one : α, data)
class semigroup (α : Type) extends has_mul α := (mul_assoc : assoc α)
class mul_one_class (α : Type) extends has_one α, has_mul α := (one_mul : left_id α)
class monoid (α : Type) extends semigroup α, mul_one_class α
"""


def _build(text, path='test.tc'):
    return build_environment([parse_file(text, path)])


@pytest.fixture
def old_env():
    env, _ = _build('set_option old_structure_cmd true\n' + monoid_hierarchy)
    return env


@pytest.fixture
def new_env():
    env, _ = _build(monoid_hierarchy)
    return env


def test_flatten_old(old_env):
    """Old structures copy every ancestor field flat."""
    monoid = old_env.classes['monoid']
    assert monoid.mode == OLD
    assert [f.name for f in monoid.fields] == [
        'mul', 'mul_assoc', 'one', 'one_mul'
    ]


def test_flatten_idempotent(old_env):
    monoid = old_env.classes['monoid']
    assert flatten_class(monoid, old_env) == monoid


def test_embed_new(new_env):
    """New structures embed the first parent, copy the overlap flat."""
    monoid = new_env.classes['monoid']
    assert monoid.mode == NEW
    assert [f.name for f in monoid.fields] == [
        'to_semigroup', 'one', 'one_mul'
    ]
    assert [f.name for f in new_env.classes['mul_one_class'].fields] == [
        'to_has_one', 'to_has_mul', 'one_mul'
    ]


@pytest.mark.parametrize('mode', ['old', 'new'])
def test_leaf_fields(mode, old_env, new_env):
    """Both modes expose the same leaves."""
    env = old_env if mode == 'old' else new_env
    leaves = {leaf.name: leaf for leaf in env.leaf_fields('monoid')}
    assert set(leaves) == {'mul', 'mul_assoc', 'one', 'one_mul'}
    assert leaves['mul'].kind == 'data'
    assert leaves['mul'].origin == 'has_mul'
    assert leaves['mul_assoc'].kind == 'proof'
    assert leaves['mul'].type == Const('binop', (Var('α'), ))


def test_projections(new_env):
    names = [i.name for i in new_env.candidates('has_mul')]
    assert names == ['semigroup.to_has_mul', 'mul_one_class.to_has_mul']
    proj = new_env.candidates('has_mul')[0]
    assert proj.provenance == PROJECTION
    assert new_env.priority(proj) == PROJECTION_PRIORITY
    assert proj.instance_binders[0].type == Const('semigroup', (Var('α'), ))
    assert [i.name for i in new_env.candidates('semigroup')] == [
        'monoid.to_semigroup'
    ]


def test_embed_and_project_unregistered(new_env):
    decl, = parse_file(
        'class comm_monoid (α : Type) extends monoid α := (mul_comm : comm α)'
    ).commands
    embedded = embed_parents(decl, new_env)
    assert [f.name for f in embedded.fields] == ['to_monoid', 'mul_comm']
    proj, = generate_projections(embedded)
    assert proj.name == 'comm_monoid.to_monoid'
    assert proj.head == Const('monoid', (Var('α'), ))
    assert proj.priority == PROJECTION_PRIORITY
    assert proj.instance_binders[0].type == Const('comm_monoid', (Var('α'), ))
    assert generate_projections(new_env.classes['has_mul']) == []


def test_projections_only_for_extends():
    """Parents given as instance binders get no projection."""
    env, _ = load_environment([corpus_file('04_module.tc')])
    module = env.classes['module']
    assert [b.type.name for b in module.constraints] == [
        'semiring', 'add_comm_monoid'
    ]
    proj, = generate_projections(module)
    assert proj.name == 'module.to_distrib_mul_action'
    assert proj.head == Const('distrib_mul_action', (Var('R'), Var('M')))
    assert [b.name for b in proj.binders] == ['R', 'M', None]
    assert [i.name for i in env.candidates('distrib_mul_action')] == [
        'module.to_distrib_mul_action'
    ]
    for name in ('semiring', 'add_comm_monoid'):
        assert all(i.provenance != PROJECTION for i in env.candidates(name))
    assert [leaf.name for leaf in env.leaves['module']] == [
        'smul', 'zero_smul'
    ]


def test_ancestor_closure(new_env):
    assert ancestor_closure('monoid', new_env) == {
        'semigroup', 'mul_one_class', 'has_mul', 'has_one'
    }
    assert ancestor_closure('has_mul', new_env) == frozenset()


def test_candidate_order():
    """Priority descending, then declaration order."""
    env, _ = _build('class c (α : Type)\n'
                    'instance a : c nat\n'
                    '@[priority 10] instance b : c nat\n'
                    '@[priority 2000] instance d : c nat\n'
                    'instance e : c nat\n')
    assert [i.name for i in env.candidates('c')] == ['d', 'a', 'e', 'b']
    assert env.default_priority == DEFAULT_PRIORITY
    assert [i.name for i in env.all_instances()] == ['a', 'b', 'd', 'e']


def test_attribute_instance():
    env, _ = _build('class c (α : Type)\n'
                    'class d (α : Type)\n'
                    'def c.to_d {α : Type} [c α] : d α := opaque\n')
    assert not env.candidates('d')
    assert 'c.to_d' in env.decls
    env, _ = _build('class c (α : Type)\n'
                    'class d (α : Type)\n'
                    'def c.to_d {α : Type} [c α] : d α := opaque\n'
                    'attribute [instance] c.to_d\n')
    assert [i.name for i in env.candidates('d')] == ['c.to_d']
    assert env.is_instance('c.to_d')


def test_reducible_def():
    env, _ = _build('def four := 2 + 2\n'
                    'def multiset (α : Type) := quotient (perm α)\n')
    assert env.defs['four'].params == ()
    assert env.defs['multiset'].params == ('α', )


def test_goals_and_sections():
    env, goals = _build(monoid_hierarchy + 'instance nat.monoid : monoid nat\n'
                        '#synth has_mul nat\n'
                        'section s\n'
                        'letI h : has_one int\n'
                        '#synth has_one int\n'
                        'end s\n')
    assert env.frozen
    assert [g.block for g in goals] == [None, 's']
    assert goals[1].locals[0].name == 'h'
    assert goals[1].path == 'test.tc'
    assert goals[0].line == 8


@pytest.mark.parametrize('text, error', [
    ('class c (α : Type) extends d α', TCUnknownParent),
    ('instance foo : monoid nat', TCUnknownClass),
    ('class c (α : Type)\ninstance foo : c nat nat', TCArityError),
    ('class c (α : Type) := (x : α, data)\n'
     'instance foo : c nat := { y := 1 }', TCUnknownField),
    ('class c (α : Type)\nclass c (α : Type)', TCHierarchyError),
    ('class c (α : Type)\n#synth c', TCArityError),
    ('structure s (α : Type)\ninstance foo : s nat', TCUnknownClass),
    ('def loop := succ loop', TCHierarchyError),
])
def test_build_errors(text, error):
    with pytest.raises(error) as e:
        _build(text)
    assert e.value.line == text.count('\n') + 1
    assert e.value.path == 'test.tc'


def test_conflicting_field_old():
    text = ('set_option old_structure_cmd true\n'
            'class a (α : Type) := (x : α, data)\n'
            'class b (α : Type) := (x : nat, data)\n'
            'class c (α : Type) extends a α, b α\n')
    with pytest.raises(TCConflictingField):
        _build(text)


def test_ambiguous_field_new():
    text = ('class a (α : Type) := (x : α, data)\n'
            'class b (α : Type) := (x : α, data)\n'
            'class c (α : Type) extends a α, b α\n')
    with pytest.raises(TCAmbiguousField):
        _build(text)


def test_mode_resets_per_file():
    first = parse_file('set_option old_structure_cmd true\n'
                       'class a (α : Type) := (x : α, data)\n', 'a.tc')
    second = parse_file('class b (α : Type) extends a α\n', 'b.tc')
    env, _ = build_environment([first, second])
    assert env.classes['a'].mode == OLD
    assert env.classes['b'].mode == NEW


def test_frozen():
    builder = EnvironmentBuilder()
    builder.add_file(parse_file('class c (α : Type)'))
    env, _ = builder.build()
    with pytest.raises(TCFrozenEnvironment):
        env.add_instance(InstanceDecl('x', (), Const('c', (Const('nat'), ))))
