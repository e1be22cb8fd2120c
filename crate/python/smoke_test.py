"""Smoke test for the nonadaptive_median extension module.

Build and install the module first:

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml

then run ``python python/smoke_test.py``.
"""

import json
import os
import tempfile

import nonadaptive_median as nm


def main():
    line = nm.MetricSpace.line(4)
    run = nm.approx_median(line, 2)
    assert (run.t, run.sigma, run.output) == (2, 1, 3), run
    index, cost, _ = nm.exact_median(line)
    assert (index, cost) == (1, 4.0)
    assert run.output_cost / cost == 1.5

    # Same (n, h) on different metrics: identical query transcripts.
    hashes = set()
    for kind in ("euclidean", "graph", "perturbed-uniform"):
        for seed in range(3):
            m = nm.MetricSpace.generate(kind, 64, seed=seed)
            assert m.validate() == []
            r = nm.approx_median(m, 3)
            assert r.distinct_queries <= r.query_bound
            _, best, _ = nm.exact_median(m)
            assert r.output_cost <= 6 * best * (1 + 1e-9)
            hashes.add(r.transcript_hash)
    assert len(hashes) == 1, hashes

    m = nm.MetricSpace.generate("euclidean", 1024, seed=0)
    report = json.loads(nm.report_json(m, 2, exact=True, tilde=True))
    assert report["tilde_queries"] / report["distinct_queries"] >= 1.0
    assert report["ratio"] <= 4.0

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "line.json")
        line.save(path)
        back = nm.MetricSpace.load(path)
        assert len(back) == 4 and back.dist(0, 3) == 3.0

    print("ok")


if __name__ == "__main__":
    main()
