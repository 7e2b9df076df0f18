"""Smoke test for the `taas` Python module.

Build and install first:

    pip install --no-build-isolation -e crates/py
    python python/smoke_test.py
"""

import json

import taas


def main():
    tax = taas.Taxonomy("Smoke")
    assert tax.version == 1
    dim = tax.add_dimension("Attack")
    root = tax.add_concept(dim, "Fault Injection", kind="major")
    leaf = tax.add_concept(dim, "Voltage Glitching")
    tax.add_relation(leaf, root, rel_type="inheritance")
    tax.add_synonym(leaf, "glitching attack")

    try:
        tax.add_relation(root, leaf, rel_type="composition")
    except taas.TaasError as e:
        assert e.args[0] == "hierarchy_cycle", e.args
    else:
        raise AssertionError("cycle accepted")

    outcome = tax.import_papers([
        {"id": "p1", "title": "Voltage glitching in practice", "year": 2020, "citation_count": 4,
         "body_text": "voltage glitching " * 3 + "fault injection"},
        {"id": "p2", "title": "Fault injection survey", "year": 2021, "citation_count": 9,
         "body_text": "fault injection " * 4},
    ])
    assert outcome["created"] == ["p1", "p2"], outcome
    assert tax.vote("alice", "p1", "include") == 1

    suggestions = taas.suggest(tax, "levenshtein", moc=3)
    pairs = {(s["paper_id"], s["concept_id"]) for s in suggestions}
    assert ("p1", leaf) in pairs and ("p2", root) in pairs, pairs
    assert tax.apply_suggestions(suggestions) == len(suggestions)

    matrix = taas.correlation_matrix(tax)
    n = len(matrix["labels"])
    cells = matrix["cells"]
    assert all(cells[i][j] == cells[j][i] for i in range(n) for j in range(n))
    i, j = matrix["axis"].index(root), matrix["axis"].index(leaf)
    # p1 reaches the root through the leaf, so the pair shares one paper.
    assert cells[i][j] == 1, cells
    assert cells[i][i] == 2, cells

    circles = taas.cropcircles_layout(tax)
    assert len(circles["circles"]) == 2
    points = taas.surface(tax, "citation_sum")
    assert points, points
    coverage = taas.coverage_report(tax)
    assert coverage["gaps"] == [], coverage

    assert taas.levenshtein_distance("kitten", "sitting") == 3
    assert abs(taas.dice_similarity("night", "nacht") - 0.25) < 1e-12

    again = taas.Taxonomy.from_json(tax.to_json())
    assert json.loads(again.to_json()) == json.loads(tax.to_json())

    _, rows = taas.synthetic_conformity(seed=7)
    by_key = {(r["method"], r["moc"]): r["conformity_pct"] for r in rows}
    assert len(by_key) == 16
    assert by_key[("levenshtein", 3)] >= 95.0, by_key
    assert by_key[("dice", 3)] >= 85.0, by_key

    bench = taas.matrix_benchmark(sizes=[10, 20], repetitions=2, seed=1)
    assert [r["n"] for r in bench] == [10, 20]

    print("smoke test passed")


if __name__ == "__main__":
    main()
