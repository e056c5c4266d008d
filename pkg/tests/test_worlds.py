import pytest

from cpx.cause import CauseDefinition
from cpx.errors import BadDistribution, EmptySupport, UnknownVariable
from cpx.scm import Literal
from cpx.worlds import (
    KnowledgeState,
    Message,
    World,
    check_explanandum_known,
    condition,
    denotation,
    message_index,
    prior_from_exogenous,
    with_silence,
)

F1 = Literal.eq("F", 1)
U11 = {"U_R": 1, "U_D": 1}


def _k(roof, prior=None):
    return KnowledgeState([World(n, m, U11) for n, m in roof.items()], prior)


def test_prior_is_normalized(roof):
    k = _k(roof, [1, 1, 2, 0])
    assert k.prior == (0.25, 0.25, 0.5, 0.0)
    assert k.support() == ("M_R", "M_D", "M_and")
    assert k.prior_of("M_and") == 0.5


def test_prior_errors(roof):
    with pytest.raises(BadDistribution):
        _k(roof, [1, 1])
    with pytest.raises(BadDistribution):
        _k(roof, [1, -1, 1, 1])
    with pytest.raises(EmptySupport):
        _k(roof, [0, 0, 0, 0])
    with pytest.raises(EmptySupport):
        KnowledgeState([])


def test_world_context_must_be_total(roof):
    with pytest.raises(UnknownVariable):
        World("w", roof["M_R"], {"U_R": 1})
    with pytest.raises(UnknownVariable):
        World("w", roof["M_R"], {"U_R": 1, "U_D": 3})


def test_condition_keeps_relative_mass(roof):
    k = condition(_k(roof, [1, 2, 3, 4]), ["M_D", "M_or"])
    assert k.ids == ("M_D", "M_or")
    assert k.prior == pytest.approx((2 / 6, 4 / 6))
    with pytest.raises(EmptySupport):
        condition(_k(roof, [1, 0, 1, 1]), ["M_D"])


def test_prior_from_exogenous(corpus):
    sc = corpus("milk_theft_normality")
    weights = prior_from_exogenous(sc.k.worlds)
    assert weights == pytest.approx([0.1 * 0.1, 0.9 * 0.9, 0.1 * 0.9])
    assert sum(sc.k.prior) == pytest.approx(1.0)


def test_roof_denotations(roof):
    k = _k(roof)
    r = Message("R", (Literal.eq("R", 1),), F1)
    d = Message("D", (Literal.eq("D", 1),), F1)
    assert denotation(r, k) == ("M_R", "M_and", "M_or")
    assert denotation(d, k) == ("M_D", "M_and", "M_or")
    # but-for drops the disjunctive structure: neither cause is needed there
    assert denotation(r, k, CauseDefinition.BUT_FOR) == ("M_R", "M_and")


def test_silence_is_true_everywhere(roof):
    k = _k(roof)
    s = Message.silence()
    assert s.is_silence and denotation(s, k) == k.ids
    msgs = with_silence([Message("R", (Literal.eq("R", 1),), F1)])
    assert msgs[-1].is_silence
    assert len(with_silence(msgs)) == len(msgs)


def test_explanandum_known(roof):
    k = _k(roof)
    assert check_explanandum_known(k, F1)
    assert not check_explanandum_known(k, Literal.eq("F", 0))


def test_message_checks(roof):
    k = _k(roof)
    with pytest.raises(UnknownVariable):
        denotation(Message("bad", (Literal.eq("U_R", 1),), F1), k)
    with pytest.raises(ValueError):
        Message("neg", (Literal.eq("R", 1),), F1, cost=-1)
    with pytest.raises(ValueError):
        message_index([Message.silence(), Message.silence()])
