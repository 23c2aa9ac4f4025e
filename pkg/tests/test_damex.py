import io
import json
import time

import numpy as np
import pytest

from extremis import damex, subsets
from extremis.damex import FIXED_SCALE, DamexParams
from extremis.errors import InvalidInputError, ModelFormatError, ModelVersionError, ParameterError

S1, S2 = subsets.subset(1), subsets.subset(2)


def comonotone(n, d, seed=0):
    col = np.random.default_rng(seed).normal(size=n)
    return np.tile(col[:, None], (1, d))


def mixed_data(n=2000, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.pareto(1.0, n) + 1
    b = rng.pareto(1.0, n) + 1
    c = a * rng.uniform(0.9, 1.1, n)
    return np.column_stack([a, b, c])


@pytest.mark.parametrize(
    "kwargs",
    [dict(k=0), dict(k=2.5), dict(k="sqrt"), dict(epsilon=0.0), dict(epsilon=1.0), dict(p=-0.1),
     dict(membership_mode="nope")],
)
def test_params_validation(kwargs):
    with pytest.raises(ParameterError):
        DamexParams(**kwargs)


def test_auto_k_and_k_above_n():
    assert DamexParams().resolve_k(400) == 20
    assert DamexParams().resolve_k(399) == 19
    with pytest.raises(ParameterError):
        damex.fit(np.ones((5, 2)), DamexParams(k=6))


def test_fit_comonotone():
    model = damex.fit(comonotone(400, 3), DamexParams(epsilon=0.2))
    assert model.representation.masses == {subsets.full(3): 1.0}
    assert model.n_train == model.representation.n == 400
    assert model.k == 20


def test_fit_countermonotone_six_rows():
    X = np.column_stack([np.arange(1.0, 7.0), np.arange(6.0, 0.0, -1.0)])
    model = damex.fit(X, DamexParams(k=2, epsilon=0.9, p=0.0))
    assert model.representation.masses == {S1: 1.0, S2: 1.0}


def test_unlisted_subset_scores_zero():
    X = np.column_stack([np.arange(1.0, 7.0), np.arange(6.0, 0.0, -1.0)])
    model = damex.fit(X, DamexParams(k=2, epsilon=0.9, p=0.0))
    rec = damex.score(model, [6.0, 6.0])
    assert rec.subset == subsets.subset(1, 2)
    assert rec.score == 0.0


def test_comonotone_point_above_all_maxima():
    n = 400
    model = damex.fit(comonotone(n, 3), DamexParams(epsilon=0.2))
    rec = damex.score(model, [100.0, 100.0, 100.0])
    assert rec.subset == subsets.full(3)
    assert rec.radius == 2 * n
    assert rec.score == 1 / (2 * n)


def test_larger_radius_same_subset_scores_lower():
    model = damex.fit(comonotone(400, 2), DamexParams(epsilon=0.2))
    low, high = damex.score(model, [1.0, 1.0]), damex.score(model, [2.0, 2.0])
    assert low.subset == high.subset
    assert high.radius > low.radius and high.score < low.score


def test_self_scaled_subset_always_contains_argmax():
    model = damex.fit(mixed_data(), DamexParams(epsilon=0.3))
    rng = np.random.default_rng(1)
    probes = rng.pareto(1.0, (200, 3)) + 1
    _, radii, codes = damex.score_samples(model, probes)
    V = model.ranker.standardize(probes)
    for v, c in zip(V, codes):
        assert c is not None and c >> int(np.argmax(v)) & 1


def test_fixed_scale_mode_matches_training_assignment():
    X = mixed_data()
    model = damex.fit(X, DamexParams(epsilon=0.3, membership_mode=FIXED_SCALE))
    rng = np.random.default_rng(2)
    probes = rng.pareto(1.0, (300, 3)) + 1
    scores, radii, codes = damex.score_samples(model, probes)
    V = model.ranker.standardize(probes)
    masses = model.representation.masses
    for v, s, r, c in zip(V, scores, radii, codes):
        expected = damex.fixed_scale_subset(model, v)
        assert c == expected
        assert s == (0.0 if c is None else masses.get(c, 0.0) / r)


def test_score_bounds_and_radius_range():
    model = damex.fit(mixed_data(), DamexParams(epsilon=0.1))
    rng = np.random.default_rng(3)
    probes = np.vstack([rng.pareto(1.0, (300, 3)) + 1, -np.ones((1, 3)), np.full((1, 3), 1e9)])
    scores, radii, _ = damex.score_samples(model, probes)
    total = model.representation.total_mass
    assert np.all(scores >= 0) and np.all(scores <= total / radii + 1e-15)
    assert np.all(radii >= 1) and np.all(radii <= 2 * model.n_train)


def test_score_batch_empty_training_and_permuted():
    X = mixed_data()
    model = damex.fit(X, DamexParams(epsilon=0.1))
    assert damex.score_batch(model, np.empty((0, 3))) == []
    recs = damex.score_batch(model, X)
    s = np.array([r.score for r in recs])
    assert np.all(np.isfinite(s)) and np.all(s >= 0)
    assert [r.row for r in recs] == list(range(len(X)))
    perm = np.random.default_rng(4).permutation(len(X))
    s2, _, _ = damex.score_samples(model, X[perm])
    np.testing.assert_array_equal(s2, s[perm])


def test_dimension_mismatch():
    model = damex.fit(mixed_data(200), DamexParams(epsilon=0.2))
    with pytest.raises(InvalidInputError):
        damex.score(model, [1.0, 2.0])
    with pytest.raises(InvalidInputError):
        damex.score_samples(model, np.ones((4, 2)))


def monotone_copies(X):
    yield np.exp(X)
    yield X ** 3
    yield 2.5 * X + 4.0


def test_scale_invariance():
    rng = np.random.default_rng(5)
    train = rng.normal(size=(1500, 3))
    train[:, 2] = train[:, 0] + 0.1 * rng.normal(size=1500)
    test = rng.normal(size=(500, 3)) * 1.5
    base = damex.fit(train, DamexParams(epsilon=0.1))
    base_scores = damex.score_batch(base, test)
    for g_train, g_test in zip(monotone_copies(train), monotone_copies(test)):
        # the transforms must not merge distinct values for the claim to apply
        both = np.vstack([train, test])
        g_both = np.vstack([g_train, g_test])
        for j in range(3):
            assert len(np.unique(both[:, j])) == len(np.unique(g_both[:, j]))
        m = damex.fit(g_train, DamexParams(epsilon=0.1))
        assert json.dumps(m.representation.to_dict()) == json.dumps(base.representation.to_dict())
        assert damex.score_batch(m, g_test) == base_scores


def test_save_load_round_trip(tmp_path):
    model = damex.fit(mixed_data(), DamexParams(epsilon=0.05, p=0.2))
    path = tmp_path / "m.json"
    damex.save(model, path)
    again = damex.load(path)
    assert again.representation == model.representation and again.params == model.params
    np.testing.assert_array_equal(again.ranker.sorted_columns, model.ranker.sorted_columns)
    probes = np.random.default_rng(6).pareto(1.0, (100, 3)) + 1
    a = damex.score_samples(model, probes)
    b = damex.score_samples(again, probes)
    assert a[0].tobytes() == b[0].tobytes() and a[2] == b[2]


def test_truncated_file_is_a_parse_error(tmp_path):
    buf = io.StringIO()
    damex.save(damex.fit(mixed_data(200), DamexParams(epsilon=0.2)), buf)
    text = buf.getvalue()
    with pytest.raises(ModelFormatError, match="line 1, column"):
        damex.load(io.StringIO(text[: len(text) // 2]))


def test_unknown_version_is_rejected():
    doc = damex.to_dict(damex.fit(mixed_data(200), DamexParams(epsilon=0.2)))
    doc["version"] = 99
    with pytest.raises(ModelVersionError):
        damex.load(io.StringIO(json.dumps(doc)))


def test_malformed_document():
    with pytest.raises(ModelFormatError):
        damex.load(io.StringIO('{"version": 1, "params": {}}'))
    with pytest.raises(ModelFormatError):
        damex.load(io.StringIO("[1, 2]"))


def _fit_seconds(X, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        damex.fit(X, DamexParams(epsilon=0.1))
        best = min(best, time.perf_counter() - t0)
    return best


def test_fit_time_grows_near_n_log_n():
    rng = np.random.default_rng(7)
    X = rng.pareto(1.0, (400_000, 4))
    t_half = _fit_seconds(X[:200_000])
    t_full = _fit_seconds(X)
    assert t_full / t_half < 2.4
