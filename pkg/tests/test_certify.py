import random
from fractions import Fraction

import pytest

from modules.certify import (
    InstanceError,
    MissingSeedError,
    SosInstance,
    SpanError,
    Verdict,
    ansatz_equations,
    ansatz_system,
    build_ansatz,
    coefficient_matrix,
    decide_t_squares,
    find_witness,
    first_mismatch,
    generate_family_instance,
    stage1_pin_summands,
    substitute_ansatz,
    triangular_reduce,
    verify_instance,
)
from modules.groebner import Budget, Outcome
from modules.parser import parse_polynomial
from modules.polyring import Polynomial, RingContext, expand_sos
from tests.conftest import SEEDS

R5 = RingContext.standard(5)

X1_FOURTH = "vars: n=1\np1 = x1^2\n"
TWO_QUARTICS = "vars: n=2\np1 = x1^2\np2 = x2^2\n"


def instance(text, name="test"):
    return SosInstance.from_text(name, text)


def identity_point(ansatz):
    return {ansatz.name(i, i): Fraction(1) for i in range(1, min(ansatz.s, ansatz.t) + 1)}


def test_verify_builtins(example_2_1, example_2_2):
    assert verify_instance(example_2_1) and example_2_1.s == 4
    assert verify_instance(example_2_2) and example_2_2.s == 8
    assert coefficient_matrix(example_2_2).shape == (8, 15)


def test_verify_detects_perturbed_target(example_2_2):
    g = example_2_2.g + Polynomial(R5, {(0, 0, 0, 0, 4): 1})
    bad = SosInstance("perturbed", R5, g, example_2_2.generators)
    assert not verify_instance(bad)
    assert first_mismatch(bad) == ((0, 0, 0, 0, 4), 1, 0)


def test_verify_single_square():
    assert verify_instance(instance(X1_FOURTH))


def test_verify_detects_dependent_generators():
    dependent = instance("vars: n=2\np1 = x1\np2 = 2*x1\n")
    assert not verify_instance(dependent)
    assert first_mismatch(dependent) is None


def test_explicit_target_line():
    inst = instance("vars: n=1\np1 = x1^2\ng = 2*x1^4\n")
    assert inst.g == parse_polynomial("2*x1^4", inst.context)
    assert not verify_instance(inst)


@pytest.mark.parametrize(
    "text",
    [
        "vars: n=2\np1 = x1\np2 = x2^2\n",
        "vars: n=2\np1 = x1 + x2^2\n",
        "vars: n=2\np1 = x1\ng = x1^3\n",
    ],
)
def test_structural_validation(text):
    with pytest.raises(InstanceError):
        instance(text)


def test_stage1_on_example_2_2(stage1_2_2):
    assert stage1_2_2.space.dimension == 2
    assert stage1_2_2.kernel.dimension == 8
    assert stage1_2_2.span_matches
    assert stage1_2_2.annihilates_products
    assert stage1_2_2.vanishes_on_g
    assert stage1_2_2.gram_rank == 8
    assert stage1_2_2.verdict is Verdict.PINNED


def test_stage1_without_dual_certificate():
    result = stage1_pin_summands(instance("vars: n=2\np1 = x1\np2 = x2\n"))
    assert result.space.dimension == 0
    assert result.psd_element is None
    assert result.verdict is Verdict.INCONCLUSIVE


def test_stage1_single_linear_form():
    result = stage1_pin_summands(instance("vars: n=2\np1 = x1\n"))
    assert result.space.dimension == 1
    assert result.kernel.vectors == ((1, 0),)
    assert result.verdict is Verdict.PINNED


def test_unverified_target_is_never_pinned_or_refuted():
    R2 = RingContext.standard(2)
    x1, x2 = R2.gens()
    inst = SosInstance("unverified", R2, x1 * x1 + x2 * x2, (x1,))
    assert not verify_instance(inst)
    stage1 = stage1_pin_summands(inst)
    assert not stage1.vanishes_on_g
    assert stage1.verdict is Verdict.INCONCLUSIVE
    result = decide_t_squares(inst, 2)
    assert result.verdict is Verdict.INCONCLUSIVE
    assert result.basis is None


def test_build_ansatz_examples(example_2_2):
    ansatz = build_ansatz(8, 7)
    assert ansatz.unknown_count == 35
    f = ansatz.symbolic(example_2_2.generators)
    joint = f[0].context
    lift = lambda p: p.embed(joint, range(35, 40))
    p7, p8 = example_2_2.generators[6:]
    assert f[6] == joint.variable("u77") * lift(p7) + joint.variable("u78") * lift(p8)

    assert build_ansatz(3, 1).unknown_count == 3
    assert build_ansatz(2, 2).ring.variables == ("u11", "u12", "u22")
    assert build_ansatz(10, 1).ring.variables[-1] == "u1_10"
    with pytest.raises(ValueError):
        build_ansatz(0, 1)


def test_eighth_square_is_a_multiple_of_x4_x5(example_2_2):
    ansatz = build_ansatz(8, 8)
    f8 = ansatz.symbolic(example_2_2.generators)[7]
    joint = f8.context
    assert f8 == joint.variable("u88") * joint.variable("x4") * joint.variable("x5")


def test_single_square_equation():
    inst = instance(X1_FOURTH)
    ansatz = build_ansatz(1, 1)
    ideal = ansatz_equations(inst, ansatz)
    u11 = ansatz.ring.variable("u11")
    assert ideal.generators == (u11 * u11 - 1,)


def test_find_witness_on_the_diagonal():
    inst = instance(TWO_QUARTICS)
    two = build_ansatz(2, 2)
    assert find_witness(ansatz_equations(inst, two), two) == {"u11": 1, "u12": 0, "u22": 1}
    one = build_ansatz(2, 1)
    assert find_witness(ansatz_equations(inst, one), one) is None


def test_eight_square_system_vanishes_at_identity(example_2_2):
    ansatz = build_ansatz(8, 8)
    point = identity_point(ansatz)
    ideal = ansatz_equations(example_2_2, ansatz)
    assert all(g.evaluate(point) == 0 for g in ideal.generators)


@pytest.fixture(scope="module")
def seven_square_system(example_2_2):
    ansatz = build_ansatz(8, 7)
    return ansatz, ansatz_system(example_2_2, ansatz)


def test_seven_square_system_is_quadratic(seven_square_system):
    ansatz, system = seven_square_system
    assert system
    assert all(eq.total_degree() == 2 for _, eq in system)
    assert all(eq.context == ansatz.ring for _, eq in system)


@pytest.mark.parametrize("seed", range(10))
def test_seven_square_system_matches_expansion(seed, example_2_2, seven_square_system):
    ansatz, system = seven_square_system
    rng = random.Random(seed)
    point = {name: Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for name in ansatz.ring.variables}
    f = substitute_ansatz(ansatz, point, example_2_2.generators)
    difference = expand_sos(f) - example_2_2.g
    listed = {m for m, _ in system}
    assert set(difference.terms) <= listed
    for m, eq in system:
        assert eq.evaluate(point) == difference.coefficient(m)


@pytest.mark.parametrize("seed", SEEDS)
def test_full_ansatz_vanishes_at_identity(seed, random_polynomial):
    rng = random.Random(seed)
    ctx = RingContext.standard(3)
    generators = []
    count = rng.randint(1, 4)
    while len(generators) < count:
        p = random_polynomial(rng, ctx, terms=3, degree=2)
        if not p.is_zero():
            generators.append(p)
    inst = SosInstance("random", ctx, expand_sos(generators), tuple(generators))
    ansatz = build_ansatz(inst.s, inst.s)
    point = identity_point(ansatz)
    assert all(eq.evaluate(point) == 0 for _, eq in ansatz_system(inst, ansatz))


@pytest.mark.parametrize("seed", SEEDS)
def test_random_seven_square_candidates_miss_g(seed, example_2_2):
    rng = random.Random(seed)
    ansatz = build_ansatz(8, 7)
    point = {name: Fraction(rng.randint(-2, 2)) for name in ansatz.ring.variables}
    assert expand_sos(substitute_ansatz(ansatz, point, example_2_2.generators)) != example_2_2.g


def test_eight_squares_have_a_witness(example_2_2, stage1_2_2):
    result = decide_t_squares(example_2_2, 8, stage1_2_2)
    assert result.verdict is Verdict.WITNESS_FOUND
    assert result.witness == {
        name: Fraction(int(name in {f"u{i}{i}" for i in range(1, 9)})) for name in build_ansatz(8, 8).ring.variables
    }
    f = substitute_ansatz(build_ansatz(8, 8), result.witness, example_2_2.generators)
    assert expand_sos(f) == example_2_2.g


def test_more_squares_stay_feasible(example_2_2, stage1_2_2):
    result = decide_t_squares(example_2_2, 9, stage1_2_2)
    assert result.verdict is Verdict.WITNESS_FOUND
    assert result.unknowns == 36


def test_single_square_is_feasible():
    result = decide_t_squares(instance(X1_FOURTH), 1)
    assert result.verdict is Verdict.WITNESS_FOUND
    assert result.witness == {"u11": 1}


def test_unpinned_instances_are_not_decided():
    inst = instance(TWO_QUARTICS)
    result = decide_t_squares(inst, 1)
    assert result.verdict is Verdict.INCONCLUSIVE
    assert result.basis is None
    assert decide_t_squares(inst, 2).verdict is Verdict.WITNESS_FOUND


def test_budget_exhaustion_is_reported(example_2_2, stage1_2_2):
    result = decide_t_squares(example_2_2, 7, stage1_2_2, budget=Budget(max_pairs=1))
    assert result.verdict is Verdict.BUDGET_EXHAUSTED
    assert result.basis.outcome is Outcome.BUDGET_EXHAUSTED
    assert result.basis.pairs_processed == 1


@pytest.mark.slow
def test_seven_squares_do_not_suffice(example_2_2, stage1_2_2):
    result = decide_t_squares(example_2_2, 7, stage1_2_2)
    assert result.verdict is Verdict.INFEASIBLE
    assert result.basis.elements == (result.order.context.constant(1),)
    assert result.unknowns == 35


def test_triangular_reduce_examples(example_2_2):
    p = example_2_2.generators
    same = triangular_reduce(list(p), p)
    assert same.weights == (1,) * 8 and same.polys == tuple(p) and same.rank == 8

    p1, p2 = p[0], p[1]
    two = triangular_reduce([p1 + p2, p1 - p2], [p1, p2])
    assert two.weights == (2, 2) and two.polys == (p1, p2)

    rank_one = triangular_reduce([p1, p1], [p1, p2])
    assert rank_one.rank == 1 and rank_one.weights == (2,) and rank_one.polys == (p1,)


def test_triangular_reduce_rejects_outside_span(example_2_2):
    p = example_2_2.generators[:4]
    with pytest.raises(SpanError):
        triangular_reduce([parse_polynomial("x5^2", R5)], p)
    with pytest.raises(SpanError):
        triangular_reduce([p[0]], [p[0], p[0]])


@pytest.mark.parametrize("seed", SEEDS)
def test_triangular_reduce_reconstructs(seed, example_2_2):
    rng = random.Random(seed)
    s = rng.randint(1, 8)
    p = example_2_2.generators[:s]
    q = []
    for _ in range(rng.randint(1, 5)):
        q.append(sum((x * Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for x in p), R5.zero()))
    result = triangular_reduce(q, p)
    assert all(d > 0 for d in result.weights)
    assert sum((x * x * d for d, x in zip(result.weights, result.polys)), R5.zero()) == expand_sos(q)
    assert result.rank <= min(len(q), s)


def test_family_instance_for_five_variables(example_2_2):
    family = generate_family_instance(5)
    assert family.context == example_2_2.context
    assert family.generators == example_2_2.generators
    assert family.g == example_2_2.g
    assert verify_instance(family)


def test_family_instance_with_seed():
    family = generate_family_instance(4, ["x1^2 - x3^2", "x2^2 - x3^2", "x1*x2"])
    assert family.s == 6
    assert family.generators[3] == parse_polynomial("x1*x4", family.context)


def test_family_instance_needs_a_seed():
    with pytest.raises(MissingSeedError):
        generate_family_instance(4)
    with pytest.raises(MissingSeedError):
        generate_family_instance(4, ["x1^2"])
