"""Name resolution against the component catalog.

The edit-distance checks compare against a plain dynamic-programming
implementation written independently of the library code.
"""
import random

import pytest

from scriptflow.registry import (
    MAX_FUZZY_DISTANCE,
    edit_distance,
    is_coercible,
    normalize,
    resolve_name,
)


def dp_levenshtein(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


# frozen oracle values, computed by hand from the definition
LEVENSHTEIN_CASES = [
    ("", "", 0),
    ("a", "", 1),
    ("", "abc", 3),
    ("kitten", "sitting", 3),
    ("line", "lien", 2),
    ("loft", "loft", 0),
    ("circle", "cricle", 2),
    ("move", "mov", 1),
    ("series", "serie", 1),
    ("extrude", "extrde", 1),
]


@pytest.mark.parametrize("a,b,want", LEVENSHTEIN_CASES)
def test_edit_distance_frozen(a, b, want):
    assert edit_distance(a, b) == want
    assert dp_levenshtein(a, b) == want


def test_edit_distance_matches_dp_reference():
    rng = random.Random(7)
    alphabet = "abcdefgxyz "
    for _ in range(300):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 12)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 12)))
        assert edit_distance(a, b) == dp_levenshtein(a, b)


def test_edit_distance_cap_is_a_floor():
    # capped calls may overestimate beyond the cap but never under it
    assert edit_distance("kitten", "sitting", cap=2) > 2
    assert edit_distance("line", "line", cap=1) == 0


def test_normalize():
    assert normalize("Construct Point") == "constructpoint"
    assert normalize("construct-point") == "constructpoint"
    assert normalize("CONSTRUCT_POINT") == "constructpoint"
    assert normalize("  Loft ") == "loft"


def test_all_names_and_aliases_resolve_exact(catalog):
    for spec in catalog.components:
        for name in (spec.name, *spec.aliases):
            res = resolve_name(catalog, name)
            assert res.kind == "exact", name
            assert res.spec is spec


def test_exact_is_case_and_separator_insensitive(catalog):
    for raw in ("construct point", "ConstructPoint", "construct-point", "CONSTRUCT POINT"):
        res = resolve_name(catalog, raw)
        assert res.kind == "exact"
        assert res.spec.name == "Construct Point"


def test_fuzzy_single_typo(catalog):
    res = resolve_name(catalog, "Lien")
    assert res.kind == "fuzzy"
    assert res.spec.name == "Line"
    assert 0 < res.distance <= MAX_FUZZY_DISTANCE


def test_compound_name_without_spaces_is_exact(catalog):
    res = resolve_name(catalog, "ExtrudeLinear")
    assert res.kind == "exact"
    assert res.spec.name == "Extrude Linear"


def test_ambiguous_typo_goes_unknown_with_candidates(catalog):
    # one edit away from Unit X / Unit Y / Unit Z: no unique winner
    res = resolve_name(catalog, "Unit A")
    assert res.kind == "unknown"
    assert res.spec is None
    names = {spec.name for spec in res.nearest}
    assert names == {"Unit X", "Unit Y", "Unit Z"}


def test_garbage_goes_unknown(catalog):
    res = resolve_name(catalog, "Quantum Flux Capacitor")
    assert res.kind == "unknown"
    assert len(res.nearest) <= 3


def _corrupt(rng: random.Random, name: str, edits: int) -> str:
    alphabet = "abcdefghijklmnopqrstuvwxyz"
    out = name
    for _ in range(edits):
        if not out:
            out = rng.choice(alphabet)
            continue
        i = rng.randrange(len(out))
        op = rng.randrange(3)
        if op == 0:
            out = out[:i] + rng.choice(alphabet) + out[i:]
        elif op == 1:
            out = out[:i] + out[i + 1:]
        else:
            out = out[:i] + rng.choice(alphabet) + out[i + 1:]
    return out


def test_corruption_fuzz_resolves_to_original(catalog):
    """1,000 random <=2-edit corruptions: >=95% resolve back to the
    source component; the rest fall to unknown; none resolve wrong."""
    rng = random.Random(20240517)
    total = 0
    recovered = 0
    for _ in range(1000):
        spec = rng.choice(catalog.components)
        corrupted = _corrupt(rng, spec.name, rng.choice((1, 2)))
        total += 1
        res = resolve_name(catalog, corrupted)
        if res.kind in ("exact", "fuzzy") and res.spec is not None:
            if res.spec is spec:
                recovered += 1
            else:
                # a corruption may land nearer some other catalog name;
                # that is only wrong if the original was at least as close
                target = normalize(corrupted)
                d_winner = dp_levenshtein(target, normalize(res.spec.name))
                d_source = dp_levenshtein(target, normalize(spec.name))
                assert d_winner < d_source, (
                    f"{corrupted!r} (from {spec.name!r}) resolved to "
                    f"{res.spec.name!r} at distance {d_winner} >= {d_source}"
                )
    assert recovered / total >= 0.95, f"recovered {recovered}/{total}"


def test_fuzzy_winner_is_argmin(catalog):
    """Whenever resolution returns fuzzy, no other component is at a
    strictly smaller normalized distance."""
    rng = random.Random(99)
    for _ in range(300):
        spec = rng.choice(catalog.components)
        corrupted = _corrupt(rng, spec.name, rng.choice((1, 2)))
        res = resolve_name(catalog, corrupted)
        if res.kind != "fuzzy":
            continue
        target = normalize(corrupted)
        best = min(
            dp_levenshtein(target, normalize(other.name))
            for other in catalog.components
        )
        assert res.distance == best


COERCION_CASES = [
    ("number", "number", True),
    ("integer", "number", True),
    ("number", "integer", True),
    ("point", "geometry-any", True),
    ("curve", "geometry-any", True),
    ("surface", "geometry-any", True),
    ("number", "text", True),
    ("point", "text", True),
    ("geometry-any", "point", False),
    ("geometry-any", "curve", False),
    ("number", "vector", False),
    ("number", "point", False),
    ("point", "vector", False),
    ("vector", "point", False),
    ("text", "number", False),
    ("curve", "surface", False),
]


@pytest.mark.parametrize("source,target,want", COERCION_CASES)
def test_coercion_table(source, target, want):
    assert is_coercible(source, target) is want


def test_catalog_shape(catalog):
    assert len(catalog.components) == 26
    names = [spec.name for spec in catalog.components]
    assert len(set(names)) == 26
    for spec in catalog.components:
        assert spec.outputs, spec.name
        for port in (*spec.inputs, *spec.outputs):
            assert port.kind in {
                "number", "integer", "text", "point", "vector",
                "curve", "surface", "geometry-any",
            }


def test_repair_default_for_circle_radius(catalog):
    value = catalog.repair_default("Circle", "Radius")
    assert value is not None and value.value == 1.0
    assert catalog.repair_default("Move", "Motion") is None
