"""Test parser."""
import glob
import os

import pytest

import tcsynth.corpus
from tcsynth._exceptions import TCParseError
from tcsynth.parser import (AttributeDecl, Binder, ClassDecl, DefDecl,
                            InstanceDecl, LetI, LocalInstanceBlock, SetOption,
                            SynthGoal, parse_file, parse_term, render_decl,
                            render_file, tokenize)
from tcsynth.terms import Const, NatLit, Var

corpus_files = sorted(
    glob.glob(os.path.join(tcsynth.corpus.corpus_dir(), '*.tc')))

alpha = Var('α')


def _read(path):
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def test_class():
    source = parse_file('class has_mul (α : Type) := (mul : fn2 α, data)')
    cls, = source.commands
    assert isinstance(cls, ClassDecl)
    assert cls.name == 'has_mul'
    assert cls.param_names == ('α', )
    assert cls.fields[0].name == 'mul'
    assert cls.fields[0].kind == 'data'
    assert cls.fields[0].type == Const('fn2', (alpha, ))


def test_field_default_proof():
    cls, = parse_file('class semigroup (α : Type) := (mul_assoc : assoc α)'
                      ).commands
    assert cls.fields[0].kind == 'proof'


def test_class_out_param_and_constraints():
    cls, = parse_file('class module (R : out_param Type) (M : Type) '
                      '[semiring R] [add_comm_monoid M]').commands
    assert cls.param_names == ('R', 'M')
    assert cls.out_positions == (0, )
    assert [b.type.name for b in cls.constraints] == [
        'semiring', 'add_comm_monoid'
    ]


def test_structure_and_extends():
    cls, st = parse_file(
        'class unique (α : Type) extends inhabited α, subsingleton α\n'
        'structure point (α : Type) := (x : α, data)').commands
    assert cls.parents == (Const('inhabited', (alpha, )),
                           Const('subsingleton', (alpha, )))
    assert cls.is_class
    assert not st.is_class


def test_synth_goal():
    goal, = parse_file('#synth add_group int').commands
    assert goal == SynthGoal(Const('add_group', (Const('int'), )))


def test_instance_priority():
    inst, = parse_file('@[priority 100] instance foo [has_mul α] : '
                       'nonempty α := opaque').commands
    assert isinstance(inst, InstanceDecl)
    assert inst.priority == 100
    assert inst.binders == (Binder(None, Const('has_mul', (alpha, )),
                                   'instance'), )
    assert inst.head == Const('nonempty', (alpha, ))
    assert inst.assigns is None
    assert inst.variables == ('α', )


def test_single_letter_class():
    cls, inst, goal = parse_file('class c (α : Type)\n'
                                 'instance i : c nat\n'
                                 '#synth c nat').commands
    assert cls.name == 'c'
    assert inst.head == Const('c', (Const('nat'), ))
    assert inst.variables == ()
    assert goal.goal == Const('c', (Const('nat'), ))


def test_declared_names_not_auto_bound():
    _, _, inst = parse_file('structure t\n'
                            'class c (α : Type)\n'
                            'instance i [c β] : c t').commands
    assert inst.head == Const('c', (Const('t'), ))
    assert inst.binders[0].type == Const('c', (Var('β'), ))
    assert inst.variables == ('β', )


def test_applied_variable_rejected():
    with pytest.raises(TCParseError) as e:
        parse_file('instance i {f : Type} : c (f nat)')
    assert 'cannot be applied' in str(e.value)


def test_instance_assigns():
    inst, = parse_file('instance int.add_group : add_group ℤ := '
                       '{ add := int.add, zero := int.zero }').commands
    assert inst.head == Const('add_group', (Const('int'), ))
    assert inst.assign_map == {
        'add': Const('int.add'),
        'zero': Const('int.zero')
    }


def test_anonymous_instances():
    a, b = parse_file('instance : inhabited nat\n'
                      'instance : inhabited nat').commands
    assert a.anonymous
    assert (a.name, b.name) == ('inhabited.inst1', 'inhabited.inst2')


def test_def_attribute_and_option():
    opt, d, r, attr = parse_file(
        'set_option old_structure_cmd true\n'
        'def four := 2 + 2\n'
        'def f.inst {M : Type} [monoid M] : semigroup M := opaque\n'
        'attribute [instance] f.inst').commands
    assert opt == SetOption('old_structure_cmd', True)
    assert isinstance(d, DefDecl) and d.reducible
    assert d.body == Const('add', (NatLit(2), NatLit(2)))
    assert not r.reducible
    assert attr == AttributeDecl('f.inst')


def test_section():
    block, = parse_file('section s\n'
                        'letI h : fact (prime 5)\n'
                        'letI := module.to_group int vec\n'
                        '#synth field (zmod 5)\n'
                        'end s').commands
    assert isinstance(block, LocalInstanceBlock)
    hyp, app, goal = block.items
    assert hyp == LetI('h', Const('fact', (Const('prime', (NatLit(5), )), )))
    assert app.value == Const('module.to_group',
                              (Const('int'), Const('vec')))
    assert isinstance(goal, SynthGoal)


def test_unicode_and_crlf():
    source = parse_file('#synth monoid ℕ\r\n#synth monoid ℤ\r\n')
    assert [c.goal.args[0] for c in source.commands] == [
        Const('nat'), Const('int')
    ]


def test_parse_term():
    assert parse_term('char_p (zmod 4) (2 + 2)') == Const(
        'char_p', (Const('zmod', (NatLit(4), )), Const(
            'add', (NatLit(2), NatLit(2)))))
    with pytest.raises(TCParseError):
        parse_term('monoid nat )')


@pytest.mark.parametrize('text, line, col', [
    ('class has_mul (α : Type) := (mul : α, dat)', 1, 39),
    ('#synth monoid nat\ninstance : monoid\n  := { mul := }', 3, 15),
    ('#synth monoid nat\n$', 2, 1),
    ('class c (α : Type) := (x : α\nclass d (α : Type)', 1, 29),
    ('class c0 (α : Type)\nsection s\n#synth c0 nat\n', 3, 14),
])
def test_parse_error_position(text, line, col):
    with pytest.raises(TCParseError) as e:
        parse_file(text)
    assert e.value.line == line
    assert e.value.col == col


def test_parse_error_expected():
    with pytest.raises(TCParseError) as e:
        parse_file('instance foo monoid nat')
    assert e.value.token == 'monoid'
    assert "':'" in e.value.expected
    assert str(e.value).startswith('1:14:')


@pytest.mark.parametrize('text', [
    'class has_mul (α : Type) := (mul : fn2 α, data)',
    '#synth add_group int',
    '@[priority 100] instance foo [has_mul α] : nonempty α := opaque',
])
def test_render_decl(text):
    d, = parse_file(text).commands
    assert render_decl(d) == text


@pytest.mark.parametrize('path', corpus_files,
                         ids=[os.path.basename(p) for p in corpus_files])
def test_round_trip(path):
    """Parse, render and parse again yields the same commands."""
    source = parse_file(_read(path), path)
    assert parse_file(render_file(source)) == source


def _mutations(text):
    lines = text.splitlines(keepends=True)
    offsets = [0]
    for line in lines:
        offsets.append(offsets[-1] + len(line))
    for tok in tokenize(text):
        start = offsets[tok.line - 1] + tok.col - 1
        # aliased tokens (ℕ, ℤ) are one character in the source
        end = start + len(tok.text) if text.startswith(tok.text, start) \
            else start + 1
        yield tok.line, tok.text, text[:start] + text[end:]


# deleting these keywords lets the next name be read as an argument of the
# preceding goal, so the error surfaces on a later line
absorbing_deletions = {
    ('04_module.tc', 19, 'section'),
    ('04_module.tc', 22, 'end'),
    ('08_fact_zmod.tc', 9, 'section'),
    ('08_fact_zmod.tc', 12, 'end'),
}


@pytest.mark.parametrize('path', corpus_files,
                         ids=[os.path.basename(p) for p in corpus_files])
def test_deleted_token_error_line(path):
    """Deleting any token parses, or fails on the line of the deletion."""
    name = os.path.basename(path)
    for line, token, text in _mutations(_read(path)):
        if (name, line, token) in absorbing_deletions:
            with pytest.raises(TCParseError) as e:
                parse_file(text)
            assert e.value.line > line
            continue
        try:
            parse_file(text)
        except TCParseError as e:
            assert e.line == line, (line, token, e)
