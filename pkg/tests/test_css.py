import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperqss.access import parse_structure, template_structure
from hyperqss.css.constructions import build_for_structure, build_scheme
from hyperqss.css.primitives import (SingularSystem, additive_reconstruct, additive_split, shamir_combine,
                                     shamir_deal)
from hyperqss.css.scheme import (SchemeDescriptor, ShareBundle, Unauthorized, UnsupportedClass,
                                 block_values_from, classical_rate, deal_secret, dumps, participant_matrix,
                                 recover_secret)
from hyperqss.css.simmons import (BadDirection, ExhaustedAttempts, SimmonsSetup, check_printed_mu,
                                  check_simmons, random_direction_row, simmons_deal, simmons_recover,
                                  simmons_setup)
from hyperqss.css.verify import rank_report, verify_perfect
from hyperqss.ffield import NoSolution, field_ctx, rank, solve_affine_combination

from reference_points import (SEVEN_PARTY, SEVEN_PARTY_MU, SEVEN_PARTY_STRUCTURE, SIX_PARTY, SIX_PARTY_MU,
                           SIX_PARTY_STRUCTURE, keys_for)

CTX11 = field_ctx(11)
QUANTUM_CLASSES = [5, 6, 7, 8, 9, 10, 11, 12]


# -- primitives ----------------------------------------------------------------

@given(st.integers(0, 10), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_additive_round_trip(secret, m, seed):
    shares = additive_split(secret, m, np.random.default_rng(seed), CTX11)
    assert len(shares) == m
    assert additive_reconstruct(shares, CTX11) == secret


def test_additive_missing_share_is_uniform():
    # every secret is consistent with every (m-1)-subset of shares: count over all splits
    p, m = 5, 3
    ctx = field_ctx(p)
    counts = {}
    for s in range(p):
        for head in itertools.product(range(p), repeat=m - 1):
            counts[(head, s)] = counts.get((head, s), 0) + 1
    assert set(counts.values()) == {1}
    assert additive_reconstruct([1, 2, 3], ctx) == 1


@given(st.integers(0, 10), st.lists(st.integers(0, 10), min_size=1, max_size=3), st.data())
def test_shamir_any_threshold_subset(secret, coeffs, data):
    points = data.draw(st.lists(st.integers(1, 10), min_size=len(coeffs) + 1, max_size=6, unique=True))
    shares = shamir_deal(secret, coeffs, points, CTX11)
    subset = data.draw(st.permutations(list(zip(points, shares))))[:len(coeffs) + 1]
    assert shamir_combine(subset, CTX11) == secret


def test_shamir_known_value():
    # f(x) = 3 + 2x over F_11: f(1)=5, f(2)=7
    assert shamir_deal(3, [2], [1, 2], CTX11) == [5, 7]
    assert shamir_combine([(1, 5), (2, 7)], CTX11) == 3


def test_shamir_rejects_bad_points():
    with pytest.raises(SingularSystem):
        shamir_deal(1, [1], [2, 2], CTX11)
    with pytest.raises(SingularSystem):
        shamir_deal(1, [1], [0, 2], CTX11)
    with pytest.raises(SingularSystem):
        shamir_combine([(3, 1), (3, 2)], CTX11)


# -- Simmons -------------------------------------------------------------------

def affine_ok(points, target, mu, p):
    """Direct substitution: sum mu_i K_i == target and sum mu_i == 1."""
    dim = len(target)
    combo = [sum(c * pt[d] for c, pt in zip(mu, points)) % p for d in range(dim)]
    return combo == [t % p for t in target] and sum(mu) % p == 1


@pytest.mark.parametrize("subset", ["1234", "1267"])
def test_seven_party_coefficients(subset):
    pts = [SEVEN_PARTY[k] for k in keys_for(SEVEN_PARTY, subset)]
    mu = solve_affine_combination(pts, (0,) * 6, CTX11)
    expected = [v % 11 for v in SEVEN_PARTY_MU[subset]]
    assert mu == expected
    assert affine_ok(pts, (0,) * 6, expected, 11)
    # unique: the augmented point columns are independent
    cols = [list(pt) + [1] for pt in pts]
    assert rank(cols, 11) == len(pts)


def test_seven_party_third_subset_is_inconsistent():
    pts = [SEVEN_PARTY[k] for k in keys_for(SEVEN_PARTY, "456")]
    with pytest.raises(NoSolution):
        solve_affine_combination(pts, (0,) * 6, CTX11)
    assert check_printed_mu(pts, (0,) * 6, SEVEN_PARTY_MU["456"], CTX11)


def test_seven_party_points_do_not_realize_structure():
    setup = SimmonsSetup(11, 6, {k: tuple(v % 11 for v in pt) for k, pt in SEVEN_PARTY.items()}, (0,) * 6)
    rep = check_simmons(setup, parse_structure(SEVEN_PARTY_STRUCTURE), CTX11, geometry=False)
    assert [sorted(e) for e in rep.unsolvable_edges] == [[4, 5, 6]]
    assert len(rep.solvable_unauthorized) == 5


def test_six_party_points():
    target = (0,) * 6
    pts = [SIX_PARTY[k] for k in keys_for(SIX_PARTY, "124")]
    assert solve_affine_combination(pts, target, CTX11) == [10, 5, 2, 6]
    assert not check_printed_mu(pts, target, SIX_PARTY_MU["124"], CTX11)
    # printed rows for 136 and 235 fail the identity
    for subset in ("136", "235"):
        pts = [SIX_PARTY[k] for k in keys_for(SIX_PARTY, subset)]
        assert check_printed_mu(pts, target, SIX_PARTY_MU[subset], CTX11)
    with pytest.raises(NoSolution):
        solve_affine_combination([SIX_PARTY[k] for k in keys_for(SIX_PARTY, "136")], target, CTX11)


def test_simmons_round_trip(rng):
    s = parse_structure("{124,136,235}")
    mult = {1: 2, 2: 2, 3: 1, 4: 1, 5: 1, 6: 1}
    setup = simmons_setup(s, mult, CTX11, rng)
    assert check_simmons(setup, s, CTX11).ok
    assert setup.multiplicities() == mult
    for k in range(11):
        a = random_direction_row(setup, rng)
        lam = simmons_deal(setup, k, a, CTX11)
        for e in s.edges:
            assert simmons_recover(setup, e, lam, CTX11) == k
    assert SimmonsSetup.from_json(setup.to_json()) == setup


def test_simmons_rejects_bad_direction(rng):
    setup = simmons_setup(parse_structure("{124,136,235}"), {1: 2, 2: 2}, CTX11, rng)
    with pytest.raises(BadDirection):
        simmons_deal(setup, 1, [0] * setup.m, CTX11)


def test_single_point_per_participant_cannot_realize_g9(rng):
    # two holders in different 2-regions with one point each would need H(Pi)+H(Pj) >= 3H(S)
    s = parse_structure("{124,136,235}")
    with pytest.raises(ExhaustedAttempts):
        simmons_setup(s, {x: 1 for x in s.universe}, CTX11, rng, attempts=200)


# -- schemes -------------------------------------------------------------------

@pytest.mark.parametrize("cid", QUANTUM_CLASSES)
@pytest.mark.parametrize("p", [11, 13])
def test_constructions_are_rank_perfect(cid, p):
    assert rank_report(build_scheme(cid, None, p)).ok


@pytest.mark.parametrize("cid", QUANTUM_CLASSES)
def test_constructions_with_larger_blocks(cid):
    nb = len(build_scheme(cid, None, 11).blocks)
    sizes = [1 + (i % 2) for i in range(nb)]
    assert rank_report(build_scheme(cid, sizes, 11)).ok


@pytest.mark.parametrize("cid,expected", [(5, (1, 1, 1)), (6, (1, 1, 1, 1)), (7, (3, 3, 3, 2)),
                                          (8, (3, 3, 3, 2, 2)), (9, (3, 3, 3, 2, 2, 2)),
                                          (10, (3, 3, 3, 2, 2)), (11, (3, 3, 3, 2, 2, 2)),
                                          (12, (3, 2, 3, 2, 2))])
def test_block_share_counts(cid, expected):
    assert build_scheme(cid, None, 11).block_share_counts() == expected


@pytest.mark.parametrize("cid", [1, 2, 3, 4])
def test_hyperstar_classes_need_fallback(cid):
    with pytest.raises(UnsupportedClass):
        build_scheme(cid, None, 11)
    desc = build_scheme(cid, None, 11, allow_fallback=True)
    assert rank_report(desc).ok


def test_identities_need_large_field():
    with pytest.raises(ValueError):
        build_scheme(11, None, 5)


@pytest.mark.parametrize("cid", QUANTUM_CLASSES)
def test_deal_and_recover_every_edge(cid, rng):
    desc = build_scheme(cid, [2] + [1] * (len(build_scheme(cid, None, 11).blocks) - 1), 11)
    for _ in range(5):
        secret = [int(v) for v in rng.integers(0, 11, size=desc.secret_len)]
        bundle = deal_secret(desc, secret, rng)
        for e in desc.structure.edges:
            assert recover_secret(desc, e, bundle) == tuple(secret)


def test_unauthorized_recovery_raises(rng):
    desc = build_scheme(9, None, 11)
    bundle = deal_secret(desc, [1, 2], rng)
    for b in desc.structure.maximal_unauthorized():
        with pytest.raises(Unauthorized):
            recover_secret(desc, b, bundle)


def test_partial_block_gives_nothing(rng):
    desc = build_scheme(9, [2, 1, 1, 1, 1, 1], 11)
    bundle = deal_secret(desc, [3, 4], rng)
    assert 1 not in block_values_from(desc, {1, 3, 4}, bundle)


@given(st.sampled_from(QUANTUM_CLASSES), st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_recovery_property(cid, seed):
    rng = np.random.default_rng(seed)
    desc = build_scheme(cid, None, 11)
    secret = [int(v) for v in rng.integers(0, 11, size=desc.secret_len)]
    bundle = deal_secret(desc, secret, rng)
    assert all(recover_secret(desc, e, bundle) == tuple(secret) for e in desc.structure.edges)


def test_descriptor_json_round_trip():
    desc = build_scheme(12, [1, 2, 1, 1, 1], 11)
    back = SchemeDescriptor.from_json(desc.to_json())
    assert back.to_json() == desc.to_json()
    assert dumps(desc.to_json()) == dumps(back.to_json())


def test_build_for_relabelled_structure(rng):
    desc = build_for_structure(parse_structure("{1234,1267,456}"), 11)
    assert desc.class_id == 9
    bundle = deal_secret(desc, [7, 8], rng)
    for e in desc.structure.edges:
        assert recover_secret(desc, e, bundle) == (7, 8)
    assert rank_report(desc).ok


def test_classical_rates():
    assert classical_rate(build_scheme(5, None, 11)) == 1
    assert classical_rate(build_scheme(9, None, 11)) == pytest.approx(2 / 3)


def test_participant_matrix_sums_to_block_rows():
    desc = build_scheme(7, [2, 1, 3, 1], 11)
    mat, owners = participant_matrix(desc)
    assert len(owners) == sum(len(desc.blocks[b - 1]) * len(desc.rows_of(b)) for b in range(1, 5))
    assert rank_report(desc).ok


# -- perfectness oracle ----------------------------------------------------------

@pytest.mark.parametrize("cid", [5, 6, 7])
def test_exhaustive_perfect_small_field(cid):
    rep = verify_perfect(build_scheme(cid, None, 5))
    assert rep.mode == "exhaustive"
    assert rep.ok, rep.stats


def test_sampled_perfect(rng):
    rep = verify_perfect(build_scheme(12, None, 11), budget=20_000, rng=rng)
    assert rep.mode == "sampled"
    assert rep.ok, rep.stats


def planted_leaky_scheme():
    """G5 with the first block also handed the secret in the clear."""
    desc = build_scheme(5, None, 5)
    rows = list(desc.rows)
    from hyperqss.css.scheme import BlockRow
    rows.insert(1, BlockRow(1, "leak", (1,) + (0,) * (desc.nvars - 1)))
    return SchemeDescriptor(desc.p, desc.class_id, desc.structure, desc.blocks, desc.identities,
                            desc.secret_len, desc.var_names, tuple(rows), desc.recipe)


def test_oracles_flag_planted_leak(rng):
    desc = planted_leaky_scheme()
    assert not verify_perfect(desc).secrecy_ok
    assert not verify_perfect(desc, budget=2000, rng=rng).secrecy_ok
    assert rank_report(desc).leaking_sets
