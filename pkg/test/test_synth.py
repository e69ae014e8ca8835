"""Test synthesis."""
import pytest

from tcsynth._exceptions import (TCDepthExceeded, TCFuelExhausted,
                                 TCIllFormedGoal, TCNotFound, TCSynthFailure)
from tcsynth.corpus import corpus_file, load_environment
from tcsynth.hierarchy import build_environment
from tcsynth.parser import LetI, parse_file, parse_term
from tcsynth.synth import (LocalInstance, LocalInstances, SynthConfig,
                           check_result, enumerate_solutions, infer_type,
                           make_local_instances, prepare_goal, synthesize)
from tcsynth.terms import Const, Meta, has_metas, render, term_size


def _env(text):
    env, _ = build_environment([parse_file(text)])
    return env


def _corpus(name):
    return load_environment([corpus_file(name)])


def _synth(env, goal, locals=None, **kwargs):
    return synthesize(parse_term(goal), env, locals, SynthConfig(**kwargs))


@pytest.fixture
def add_group():
    env, _ = _corpus('02_add_group.tc')
    return env


@pytest.fixture
def unique_loop():
    env, _ = _corpus('06_unique_loop.tc')
    return env


def test_config():
    cfg = SynthConfig()
    assert (cfg.fuel, cfg.max_depth, cfg.tabled) == (20000, 64, False)
    assert SynthConfig(fuel=5)._replace(tabled=True).tabled
    with pytest.raises(ValueError):
        SynthConfig(fuel=0)
    with pytest.raises(ValueError):
        SynthConfig(max_depth=0)


def test_direct_instance(add_group):
    r = _synth(add_group, 'add_group int')
    assert r.term == Const('int.add_group')
    assert r.stats.applied == 1
    assert r.stats.size == 1


def test_projection(add_group):
    r = _synth(add_group, 'has_add int')
    assert render(r.term) == 'add_group.to_has_add int int.add_group'
    assert check_result(parse_term('has_add int'), r, add_group)


def test_not_found(add_group):
    with pytest.raises(TCNotFound) as e:
        _synth(add_group, 'add_group nat')
    assert e.value.verdict == 'not_found'
    assert e.value.stats.applied >= 1


def test_ill_formed(add_group):
    with pytest.raises(TCIllFormedGoal):
        synthesize(Const('add_group', (Meta(0), )), add_group)
    with pytest.raises(TCIllFormedGoal):
        synthesize(Const('nat'), add_group)
    with pytest.raises(TCIllFormedGoal):
        synthesize(Const('add_group', ()), add_group)


def test_definitional_matching():
    env, _ = _corpus('02_char_p.tc')
    for goal in ('char_p (zmod 4) (2 + 2)', 'char_p (zmod four) 4'):
        assert _synth(env, goal).term == Const('zmod.char_p_four')
    with pytest.raises(TCNotFound):
        _synth(env, 'char_p (zmod 4) 3')


def test_priority_argmax():
    """The first solution comes from the highest-priority candidate."""
    env = _env('class c (α : Type)\n'
               '@[priority 10] instance low : c nat\n'
               'instance mid : c nat\n'
               '@[priority 2000] instance high : c nat\n'
               'instance late : c nat\n')
    assert _synth(env, 'c nat').term == Const('high')


def test_declaration_order_breaks_ties():
    env = _env('class c (α : Type)\n'
               'instance first : c nat\n'
               'instance second : c nat\n')
    assert _synth(env, 'c nat').term == Const('first')


def test_backtracking():
    """A failing subgoal makes the search fall back to the next candidate."""
    env = _env('class c (α : Type)\n'
               'class d (α : Type)\n'
               'instance d_int : d int\n'
               'instance via_d {α : Type} [d α] : c α\n'
               '@[priority 10] instance fallback : c nat\n')
    r = _synth(env, 'c nat')
    assert r.term == Const('fallback')
    assert r.stats.backtracks >= 1
    assert _synth(env, 'c int').term == Const('via_d',
                                              (Const('int'), Const('d_int')))


def test_locals_precede_globals():
    env = _env('class c (α : Type)\n'
               '@[priority 5000] instance global : c nat\n')
    locals = LocalInstances((LocalInstance('h', Const('c', (Const('nat'), ))),
                             ))
    r = _synth(env, 'c nat', locals)
    assert r.term == Const('h')
    assert check_result(parse_term('c nat'), r, env, locals)
    assert _synth(env, 'c nat').term == Const('global')


def test_make_local_instances():
    env, goals = _corpus('04_module.tc')
    entry = [g for g in goals if g.block == 'vec_group'][0]
    locals = make_local_instances(entry.locals, env)
    local, = locals
    assert render(local.term) == ('module.add_comm_monoid_to_add_comm_group '
                                  'int vec int.semiring int.vec_module')
    assert local.head == parse_term('add_comm_group vec')
    r = synthesize(entry.goal, env, locals)
    assert r.term == local.term


def test_hypothesis_local():
    env, _ = _corpus('08_fact_zmod.tc')
    locals = make_local_instances(
        [LetI('h5', parse_term('fact (prime 5)'))], env)
    r = _synth(env, 'field (zmod 5)', locals)
    assert render(r.term) == 'zmod.field 5 h5'
    with pytest.raises(TCNotFound):
        _synth(env, 'field (zmod 5)')


def test_out_params():
    env, _ = _corpus('05_hom_classes.tc')
    goal = parse_term('has_coe_to_fun (monoid_hom nat int) _')
    r = synthesize(goal, env)
    assert r.goal == parse_term('has_coe_to_fun (monoid_hom nat int) '
                                '(pi nat int)')
    assert not has_metas(r.term)
    assert check_result(goal, r, env)


def test_out_param_module():
    env, _ = _corpus('04_module_out_param.tc')
    r = _synth(env, 'module _ vec')
    assert r.term == Const('int.vec_module')
    assert r.goal == parse_term('module int vec')


def test_prepare_goal():
    env, _ = _corpus('05_hom_classes.tc')
    goal, metas = prepare_goal(parse_term('monoid_hom_class f nat int'), env)
    assert goal == Const('monoid_hom_class', (Const('f'), Meta(0), Meta(1)))
    assert metas == [Meta(0), Meta(1)]


def test_fuel_exhausted(unique_loop):
    with pytest.raises(TCFuelExhausted) as e:
        _synth(unique_loop, 'unique nat', fuel=1000)
    assert e.value.stats.applied == 1000


def test_tabled_cuts_cycle(unique_loop):
    with pytest.raises(TCNotFound) as e:
        _synth(unique_loop, 'unique nat', tabled=True)
    assert e.value.stats.applied == 3


def test_depth_exceeded():
    env, _ = _corpus('05_ring_hom_comp.tc')
    with pytest.raises(TCDepthExceeded) as e:
        _synth(env, 'is_ring_hom cast_hom', max_depth=10)
    assert e.value.stats.max_depth == 10
    assert [g.name for g in e.value.chain[:2]] == ['is_ring_hom'] * 2
    assert isinstance(e.value, TCSynthFailure)


@pytest.mark.parametrize('name', [
    '02_add_group.tc', '02_pointwise.tc', '03_comm_monoid.tc',
    '07_mixins.tc', '09_bundled.tc'
])
def test_tabled_agrees(name):
    """Tabling does not change the answer on terminating goals."""
    env, goals = _corpus(name)
    for entry in goals:
        plain = synthesize(entry.goal, env)
        tabled = synthesize(entry.goal, env, cfg=SynthConfig(tabled=True))
        assert plain.term == tabled.term
        assert tabled.stats.applied <= plain.stats.applied


def test_deterministic():
    env, goals = _corpus('05_hom_classes.tc')
    first = [synthesize(g.goal, env) for g in goals]
    env, goals = _corpus('05_hom_classes.tc')
    second = [synthesize(g.goal, env) for g in goals]
    assert [r.term for r in first] == [r.term for r in second]
    assert [r.stats for r in first] == [r.stats for r in second]


def test_enumerate_solutions():
    env, _ = _corpus('06_nsmul_diamond.tc')
    results, complete = enumerate_solutions(parse_term('module nat nat'), env)
    assert complete
    assert [render(r.term) for r in results] == [
        'add_comm_monoid.nat_module nat nat.add_comm_monoid',
        'semiring.to_module nat nat.semiring'
    ]


def test_infer_type():
    env, _ = _corpus('02_pointwise.tc')
    term = parse_term('pointwise_monoid nat nat.monoid')
    assert infer_type(term, env) == parse_term('monoid (set nat)')
    assert infer_type(Const('unknown'), env) is None
    for text in [
            'pointwise_monoid nat.monoid', 'pointwise_monoid int nat.monoid',
            'pointwise_monoid nat pointwise_monoid'
    ]:
        assert infer_type(parse_term(text), env) is None


@pytest.mark.parametrize('name, goal, term', [
    ('02_pointwise.tc', 'monoid (set nat)', 'pointwise_monoid nat nat.monoid'),
    ('08_fact_zmod.tc', 'field (zmod 2)', 'zmod.field 2 fact_prime_two'),
    ('05_hom_classes.tc', 'monoid_hom_class (monoid_hom nat int) _ _',
     'monoid_hom.monoid_hom_class nat int nat.mul_one_class '
     'int.mul_one_class'),
    ('07_mixins.tc', 'inhabited (units punit)',
     'unique.to_inhabited (units punit) '
     '(units.unique punit punit.monoid punit.subsingleton)'),
])
def test_result_arguments(name, goal, term):
    """Every declared binder contributes one argument, in binder order."""
    env, _ = _corpus(name)
    r = _synth(env, goal)
    assert r.term == parse_term(term)
    assert r.stats.size == term_size(r.term)
    assert check_result(parse_term(goal), r, env)


def test_check_result_rejects():
    env, _ = _corpus('02_pointwise.tc')
    r = _synth(env, 'monoid (set nat)')
    assert check_result(parse_term('monoid (set nat)'), r, env)
    assert not check_result(parse_term('monoid nat'), r, env)
