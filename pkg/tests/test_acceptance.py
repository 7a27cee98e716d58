"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its runtime (run with -s to see them inline).

Expected values marked as frozen were computed with independent oracles:
direct term-by-term divergence evaluation, brute-force full-sort retrieval,
and the planted-corpus construction whose top-k membership is known by
design.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from embaudit import (
    AuditConfig,
    LN2,
    PlantedCorpusSpec,
    PlantedRole,
    average_across_models,
    generate_synthetic_corpus,
    gender_volatility,
    js_bias_score,
    kl_divergence,
    run_audit,
    skew_flags,
    uniform_baseline,
    write_bundle,
    write_report,
)
from embaudit.analysis import ModelRoleStats, RoleAudit
from embaudit.corpus.labels import GENDERS, RACES, RAW_AGE_BANDS
from embaudit.corpus.io import write_embeddings
from embaudit.corpus.taxonomy import default_taxonomy
from embaudit.metrics import prob_vector_from, uniform_like
from embaudit.retrieval import normalize, top_k
from conftest import brute_force_top_k, manifest_for, matrix_from


@contextmanager
def criterion(name, budget=None):
    start = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"\nACCEPTANCE {name}: FAIL ({time.perf_counter() - start:.2f}s)")
        raise
    elapsed = time.perf_counter() - start
    if budget is not None and elapsed >= budget:
        print(f"\nACCEPTANCE {name}: FAIL (runtime {elapsed:.2f}s >= budget {budget:.0f}s)")
        raise AssertionError(f"{name}: runtime {elapsed:.2f}s exceeded budget {budget}s")
    suffix = f", budget {budget:.0f}s" if budget is not None else ""
    print(f"\nACCEPTANCE {name}: PASS ({elapsed:.2f}s{suffix})")


def g(male, female):
    return prob_vector_from("gender", [male, female])


def test_divergence_correctness():
    with criterion("divergence-correctness", budget=1.0):
        assert js_bias_score(g(1.0, 0.0), g(0.5, 0.5)).value == pytest.approx(
            0.215761, abs=1e-6
        )
        for p in (g(0.5, 0.5), g(0.9, 0.1), prob_vector_from("race", {"Indian": 1.0})):
            assert js_bias_score(p, p).value == 0.0
        assert js_bias_score(g(1.0, 0.0), g(0.0, 1.0)).value == pytest.approx(
            LN2, abs=1e-9
        )
        disjoint_races = (
            prob_vector_from("race", {"Indian": 0.5, "Black": 0.5}),
            prob_vector_from("race", {"White": 0.25, "East Asian": 0.75}),
        )
        assert js_bias_score(*disjoint_races).value == pytest.approx(LN2, abs=1e-9)
        assert kl_divergence(g(0.5, 0.5), g(0.25, 0.75)) == pytest.approx(
            0.143841, abs=1e-6
        )


def test_retrieval_oracle_equivalence():
    with criterion("retrieval-oracle-equivalence (500 corpora)", budget=30.0):
        rng = np.random.default_rng(1234)
        for trial in range(500):
            n = int(rng.integers(2, 2001))
            d = int(rng.integers(2, 65))
            k = int(rng.integers(1, n + 1))
            raw = rng.standard_normal((n, d)).astype(np.float32)
            for _ in range(int(rng.integers(0, 3))):  # exact ties via duplicates
                raw[int(rng.integers(1, n))] = raw[int(rng.integers(0, n))]
            matrix = normalize(matrix_from(raw))
            manifest = manifest_for(matrix)
            prompt = rng.standard_normal(d).astype(np.float32)
            prompt = prompt / np.linalg.norm(prompt)
            result = top_k(matrix, manifest, prompt, k, role="r")
            oracle_ids, _ = brute_force_top_k(matrix.data, manifest.ids, prompt, k)
            assert list(result.image_ids()) == oracle_ids, f"trial {trial}: n={n} d={d} k={k}"


def test_planted_bias_recovery(tmp_path):
    with criterion("planted-bias-recovery", budget=5.0):
        spec = PlantedCorpusSpec(
            n=1000,
            dim=16,
            k=100,
            roles=(
                PlantedRole(
                    role="Nurse",
                    gender_shares={"Female": 0.9, "Male": 0.1},
                    race_shares={
                        "Indian": 0.6,
                        "White": 0.1,
                        "Black": 0.1,
                        "East Asian": 0.1,
                        "Latino_Hispanic": 0.1,
                    },
                    age_shares={"Adult": 1.0},
                ),
            ),
        )
        bundle = generate_synthetic_corpus(spec, seed=2024)
        paths = write_bundle(bundle, tmp_path / "bundle")
        report = run_audit(AuditConfig.from_file(paths["config"]))
        nurse = report.averaged["Nurse"]
        assert nurse["gender"]["Female"] == 0.9  # exact: 90 of 100 hits
        assert nurse["dominant"]["race"] == "Indian"
        analytic = js_bias_score(g(0.1, 0.9), g(0.5, 0.5)).value
        assert abs(nurse["bias_nats"]["gender"] - analytic) <= 1e-9


def test_metric_property_suite():
    with criterion("metric-property-suite (4x10^4 samples)", budget=30.0):
        rng = np.random.default_rng(555)
        samples = 10_000
        for c, dim in ((2, "gender"), (3, "age"), (7, "race"), (42, "joint")):
            baseline = uniform_baseline(c, dimension=dim)
            draws = rng.dirichlet(np.ones(c), size=samples)
            violations = 0
            for i in range(samples):
                p = prob_vector_from(dim, draws[i])
                if abs(float(np.sum(p.p)) - 1.0) > 1e-9:
                    violations += 1
                forward = js_bias_score(p, baseline).value
                backward = js_bias_score(baseline, p).value
                if forward != backward:
                    violations += 1
                if not (0.0 <= forward <= LN2 + 1e-12):
                    violations += 1
                maxdiff = float(np.max(np.abs(p.p - baseline.p)))
                if (forward < 1e-12) != (maxdiff < 1e-9):
                    violations += 1
            assert violations == 0, f"C={c}: {violations} violations"


def test_analysis_correctness():
    with criterion("analysis-correctness", budget=5.0):
        def stats(male):
            gender = g(male, 1.0 - male)
            race = prob_vector_from("race", {"Indian": 1.0})
            age = prob_vector_from("age", {"Adult": 1.0})
            joint = prob_vector_from("joint", {"Male|Indian|Adult": 1.0})
            bias = {d: js_bias_score(v, uniform_like(v)) for d, v in
                    (("gender", gender), ("race", race), ("age", age), ("joint", joint))}
            return ModelRoleStats(gender=gender, race=race, age=age, joint=joint, bias=bias)

        audit = RoleAudit(
            role="Dermatologist",
            per_model={f"m{i}": stats(s) for i, s in enumerate((0.78, 0.24, 0.81, 0.13))},
        )
        entry = gender_volatility([audit])[0]
        assert entry.stddev == pytest.approx(0.3077, abs=1e-4)

        boundary = skew_flags(g(0.60, 0.40), 0.60, role="R")
        assert [f.category for f in boundary] == ["Male"]

        two = RoleAudit(role="R", per_model={"a": stats(1.0), "b": stats(0.0)})
        mean = average_across_models(two)["gender"]
        assert mean.as_mapping() == {"Male": 0.5, "Female": 0.5}


def _write_scale_inputs(root, n=108_501, dim=512, model_count=4):
    rng = np.random.default_rng(97)
    taxonomy = default_taxonomy()
    roles = taxonomy.role_names()
    width = len(str(n - 1))
    ids = tuple(f"img{i:0{width}d}.jpg" for i in range(n))

    genders = rng.integers(0, len(GENDERS), size=n)
    races = rng.integers(0, len(RACES), size=n)
    bands = rng.integers(0, len(RAW_AGE_BANDS), size=n)
    lines = ["file,age,gender,race"]
    for i in range(n):
        lines.append(f"{ids[i]},{RAW_AGE_BANDS[bands[i]]},{GENDERS[genders[i]]},{RACES[races[i]]}")
    (root / "labels.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    models = []
    for m in range(model_count):
        model_id = f"pseudo-{m}"
        images = rng.standard_normal((n, dim), dtype=np.float32)
        prompts = rng.standard_normal((len(roles), dim), dtype=np.float32)
        write_embeddings(
            root / f"{model_id}.images.emb1", images, model_id=model_id, kind="image", ids=ids
        )
        write_embeddings(
            root / f"{model_id}.prompts.emb1",
            prompts,
            model_id=model_id,
            kind="prompt",
            ids=roles,
        )
        del images
        models.append(
            {
                "model_id": model_id,
                "images": f"{model_id}.images.emb1",
                "prompts": f"{model_id}.prompts.emb1",
            }
        )
    config = {"labels": "labels.csv", "k": 100, "models": models}
    (root / "config.json").write_text(json.dumps(config), encoding="utf-8")
    return root / "config.json"


def test_determinism_and_scale(tmp_path):
    config_path = _write_scale_inputs(tmp_path)
    with criterion("determinism-and-scale (108501x512, 4 models, 33 prompts)", budget=None):
        durations = []
        outs = []
        for i, workers in enumerate((1, 2)):
            out = tmp_path / f"out{i}"
            config = AuditConfig.from_file(config_path, out_dir=out, workers=workers)
            start = time.perf_counter()
            report = run_audit(config)
            write_report(report, out, config.formats)
            durations.append(time.perf_counter() - start)
            outs.append(out)
            assert len(report.models) == 4 and len(report.roles) == 33
            assert sum(len(v) for v in report.retrievals.values()) == 132
            assert len(report.averaged) == 33
        assert all(d < 60.0 for d in durations), f"audit runs took {durations}"
        names = sorted(str(p.relative_to(outs[0])) for p in outs[0].rglob("*") if p.is_file())
        assert names, "no report files written"
        for out in outs[1:]:
            other = sorted(str(p.relative_to(out)) for p in out.rglob("*") if p.is_file())
            assert other == names
            for name in names:
                assert (out / name).read_bytes() == (outs[0] / name).read_bytes(), name
        print(f"\n  scale audit runs: {[f'{d:.1f}s' for d in durations]} (budget 60s each)")


def test_end_to_end_smoke(tmp_path):
    with criterion("end-to-end-smoke (10 images, 2 roles, 1 model)", budget=10.0):
        spec = PlantedCorpusSpec(
            n=10,
            dim=6,
            k=3,
            roles=(
                PlantedRole(
                    role="Nurse",
                    gender_shares={"Female": 1.0},
                    race_shares={"Indian": 1.0},
                    age_shares={"Adult": 1.0},
                ),
                PlantedRole(
                    role="Surgeon",
                    gender_shares={"Male": 1.0},
                    race_shares={"White": 1.0},
                    age_shares={"Old": 1.0},
                ),
            ),
        )
        bundle = generate_synthetic_corpus(spec, seed=8)
        paths = write_bundle(bundle, tmp_path / "bundle")
        out = tmp_path / "out"
        config = AuditConfig.from_file(paths["config"], out_dir=out)
        report = run_audit(config)
        write_report(report, out, config.formats)

        doc = json.loads((out / "report.json").read_text(encoding="utf-8"))
        for key in (
            "tool",
            "config",
            "k",
            "skew_threshold",
            "models",
            "roles",
            "categories",
            "corpora",
            "per_model",
            "averaged",
            "skew_flags",
            "volatility",
            "intersections",
            "retrievals",
            "notes",
        ):
            assert key in doc, key
        assert doc["roles"] == ["Nurse", "Surgeon"]
        assert len(doc["retrievals"]["synthetic"]["Nurse"]["hits"]) == 3
        for role, entry in doc["averaged"].items():
            for dim in ("gender", "race", "age"):
                for category, share in entry[dim].items():
                    per_model = [
                        doc["per_model"][m][role][dim][category] for m in doc["models"]
                    ]
                    assert abs(share - sum(per_model) / len(per_model)) <= 1e-9
