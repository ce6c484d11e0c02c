import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lipext import (
    BasepointInCut,
    EmptyCut,
    Extreme,
    GenConfig,
    InvalidCut,
    LipschitzPoint,
    NotAMember,
    NotExtreme,
    NormSpec,
    SlackCut,
    TooLarge,
    build_tight_graph,
    certify_extremality,
    cut_oracle_bruteforce,
    gen_euclidean_space,
    gen_extreme,
    gen_member,
    gen_random_metric,
    is_member,
    min_cut_slack,
    split_nonextreme,
    validate_metric,
)
from lipext.metric import norm_eval

from conftest import point


# ------------------------------------------------------------- tight graph

def test_tight_graph_examples(unit_pair, triangle, l2):
    assert build_tight_graph(point([1, 0]), unit_pair, l2).edges == {(0, 1)}
    assert build_tight_graph(point([0.5, 0]), unit_pair, l2).edges == frozenset()
    # norms: (0,1) = 1, (0,2) = 0, (1,2) = 1 against unit distances
    g = build_tight_graph(point([1, 0], [0, 0]), triangle, l2)
    assert g.edges == {(0, 1), (1, 2)}
    assert g.neighbors(1) == [0, 2]


def test_tight_graph_requires_member(unit_pair, l2):
    with pytest.raises(NotAMember) as err:
        build_tight_graph(point([1.5, 0]), unit_pair, l2)
    assert err.value.pair == (0, 1)


# -------------------------------------------------------------- certificates

def test_certify_examples(unit_pair, triangle, l2):
    cert = certify_extremality(point([1, 0]), unit_pair, l2)
    assert cert == Extreme({1: 0})
    cert = certify_extremality(point([0, 0]), unit_pair, l2)
    assert isinstance(cert, NotExtreme)
    assert cert.cut.S == (1,)
    assert cert.cut.epsilon == 1.0
    cert = certify_extremality(point([1, 0], [0, 0]), triangle, l2)
    assert cert == Extreme({1: 0, 2: 1})
    assert cert.path_to_base(2) == [2, 1, 0]


def test_certificate_cut_is_maximal(l2):
    # node 1 tight to 0; nodes 2 and 3 only tight to each other
    X = validate_metric([[0, 1, 2, 2], [1, 0, 2, 2], [2, 2, 0, 1], [2, 2, 1, 0]])
    y = point([1, 0], [0, 0.5], [0, -0.5])
    cert = certify_extremality(y, X, l2)
    assert isinstance(cert, NotExtreme)
    assert cert.cut.S == (2, 3)
    # slacks across the cut: (2,0) 1.5, (3,0) 1.5, (2,1) 2 - sqrt(1.25), (3,1) same
    assert cert.cut.epsilon == pytest.approx(2 - np.sqrt(1.25), abs=1e-15)


def test_min_cut_slack_examples(unit_pair, triangle, l2):
    assert min_cut_slack(point([0, 0]), [1], unit_pair, l2) == 1.0
    assert min_cut_slack(point([1, 0]), [1], unit_pair, l2) == 0.0
    # cross pairs (1,0): 1 - 0.5 and (2,0): 1 - 0
    assert min_cut_slack(point([0.5, 0], [0, 0]), [1, 2], triangle, l2) == 0.5


def test_min_cut_slack_errors(unit_pair, l2):
    with pytest.raises(EmptyCut):
        min_cut_slack(point([0, 0]), [], unit_pair, l2)
    with pytest.raises(BasepointInCut):
        min_cut_slack(point([0, 0]), [0, 1], unit_pair, l2)


def test_slack_cut_type_invariants():
    with pytest.raises(EmptyCut):
        SlackCut((), 1.0)
    with pytest.raises(BasepointInCut):
        SlackCut((0, 2), 1.0)
    assert SlackCut([3, 1], 0.5).S == (1, 3)


# -------------------------------------------------------------------- oracle

def test_oracle_examples(unit_pair, triangle, l2):
    assert cut_oracle_bruteforce(point([1, 0]), unit_pair, l2) is None
    cut = cut_oracle_bruteforce(point([0, 0]), unit_pair, l2)
    assert cut.S == (1,) and cut.epsilon == 1.0
    # {1}: pair (1,0) tight; {2}: pair (2,1) tight; {1,2}: pair (1,0) tight
    assert cut_oracle_bruteforce(point([1, 0], [0, 0]), triangle, l2) is None


def test_oracle_returns_first_subset_in_bitmask_order(triangle, l2):
    # zero map: every subset is a slack cut, mask 1 = {1} comes first
    cut = cut_oracle_bruteforce(point([0, 0], [0, 0]), triangle, l2)
    assert cut.S == (1,)


def test_oracle_size_guard():
    n = 21
    X = validate_metric(np.ones((n + 1, n + 1)) - np.eye(n + 1))
    with pytest.raises(TooLarge):
        cut_oracle_bruteforce(LipschitzPoint.zeros(n, 1), X, NormSpec(1, 2))


def _instances(count, max_n=6):
    for seed in range(count):
        n = 1 + seed % max_n
        cfg = GenConfig(seed, n, dim=1 + seed % 3, p=(1.5, 2.0, 3.0)[seed % 3])
        X = gen_random_metric(cfg) if seed % 2 else gen_euclidean_space(cfg)
        y = gen_extreme(cfg, X).point if seed % 4 == 3 else gen_member(cfg, X)
        yield cfg, X, y


def test_certificate_agrees_with_oracle():
    kinds = {True: 0, False: 0}
    for cfg, X, y in _instances(240):
        cert = certify_extremality(y, X, cfg.norm)
        cut = cut_oracle_bruteforce(y, X, cfg.norm)
        assert isinstance(cert, Extreme) == (cut is None)
        kinds[isinstance(cert, Extreme)] += 1
    assert kinds[True] > 20 and kinds[False] > 20


def test_certificate_soundness():
    tol = 1e-9
    for cfg, X, y in _instances(120):
        cert = certify_extremality(y, X, cfg.norm)
        if isinstance(cert, Extreme):
            assert sorted(cert.parent) == list(range(1, X.n + 1))
            for i in range(1, X.n + 1):
                path = cert.path_to_base(i)
                assert len(path) - 1 <= X.n
                for a, b in zip(path, path[1:]):
                    gap = X.dist[a, b] - norm_eval(cfg.norm, y.values[a] - y.values[b])
                    assert abs(gap) <= tol * max(1.0, X.dist[a, b])
        else:
            assert cert.cut.epsilon == min_cut_slack(y, cert.cut.S, X, cfg.norm)
            assert cert.cut.epsilon > tol
            for i in cert.cut.S:
                for j in set(range(X.n + 1)) - set(cert.cut.S):
                    gap = X.dist[i, j] - norm_eval(cfg.norm, y.values[i] - y.values[j])
                    assert gap >= cert.cut.epsilon - 1e-15


# --------------------------------------------------------------------- split

def test_split_examples(unit_pair, triangle, l2):
    y1, y2 = split_nonextreme(point([0, 0]), SlackCut((1,), 1.0), unit_pair, l2, [1, 0])
    np.testing.assert_array_equal(y1.values[1], [1, 0])
    np.testing.assert_array_equal(y2.values[1], [-1, 0])

    y = point([1, 0], [0.5, 0])
    cert = certify_extremality(y, triangle, l2)
    assert cert.cut.S == (2,) and cert.cut.epsilon == 0.5
    y1, y2 = split_nonextreme(y, cert.cut, triangle, l2, [0, 1])
    np.testing.assert_array_equal(y1.values[2], [0.5, 0.5])
    np.testing.assert_array_equal(y2.values[2], [0.5, -0.5])
    # ||(0.5, +-0.5) - (1, 0)|| = sqrt(0.5), ||(0.5, +-0.5)|| = sqrt(0.5)
    assert is_member(y1, triangle, l2) and is_member(y2, triangle, l2)


def test_split_default_direction(unit_pair, l2):
    y1, y2 = split_nonextreme(point([0, 0]), SlackCut((1,), 1.0), unit_pair, l2)
    np.testing.assert_array_equal(y1.values[1], [1, 0])


def test_split_rejects_tight_cut(unit_pair, l2):
    with pytest.raises(InvalidCut):
        split_nonextreme(point([1, 0]), SlackCut((1,), 0.5), unit_pair, l2)


def test_split_rejects_non_unit_direction(unit_pair, l2):
    with pytest.raises(Exception):
        split_nonextreme(point([0, 0]), SlackCut((1,), 1.0), unit_pair, l2, [2, 0])


def test_split_on_random_non_extreme_members():
    done = 0
    for cfg, X, y in _instances(150):
        cert = certify_extremality(y, X, cfg.norm)
        if isinstance(cert, Extreme):
            continue
        y1, y2 = split_nonextreme(y, cert.cut, X, cfg.norm)
        assert np.max(np.abs(y1.values - y2.values)) > 1e-6
        assert is_member(y1, X, cfg.norm) and is_member(y2, X, cfg.norm)
        assert np.max(np.abs((y1.values + y2.values) / 2 - y.values)) <= 1e-12
        done += 1
    assert done > 30


# ------------------------------------------------------------ midpoint probe

@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1.0))
@settings(max_examples=150, deadline=None)
def test_extreme_points_are_not_midpoints(seed, scale):
    n = 1 + seed % 5
    cfg = GenConfig(seed, n, dim=1 + seed % 3, p=(1.5, 2.0, 3.0)[seed % 3])
    X = gen_random_metric(cfg)
    y = gen_extreme(cfg, X).point
    rng = np.random.default_rng(seed)
    delta = rng.standard_normal(y.values.shape)
    delta[0] = 0
    delta *= scale / np.max(np.abs(delta))
    y1 = LipschitzPoint(y.values + delta)
    y2 = LipschitzPoint(y.values - delta)
    assert not (is_member(y1, X, cfg.norm) and is_member(y2, X, cfg.norm))
