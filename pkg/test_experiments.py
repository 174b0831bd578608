#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experiment Registry Tests
"""

import json
from pathlib import Path

import pandas as pd
import pytest

from errors import SchemaError, UnknownExperimentError
from experiment_config import ExperimentConfig, load_config, validate, with_overrides
from experiments import REGISTRY, __version__, describe, run

REGISTRY_NAMES = {
    "folner-density",
    "concentration-fg",
    "concentration-general-restricted",
    "aperiodicity-liouville",
    "gowers-oracle",
    "mixed-seminorm-ladder",
    "inverse-diagnostic",
    "decompose",
    "mainA-linear",
    "mainB-rational",
    "recurrence-profile",
    "counterexample-dilation",
    "counterexample-archimedean",
    "omega-uniformity",
    "digits",
    "quad-equation",
    "chu-inequality",
    "lattice-identity",
    "katai-diagnostic",
}

CONFIG_DIR = Path(__file__).parent / "configs"


def run_in(tmp_path, name, **params):
    config = validate({"experiment": name, "out": str(tmp_path), "params": params}, REGISTRY)
    return run(config)


def summary_of(artifacts):
    return json.loads(artifacts.json_path.read_text(encoding="utf-8"))


def test_registry_is_complete():
    assert set(REGISTRY) == REGISTRY_NAMES
    for entry in describe():
        assert entry.summary, entry.name


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.json5")), ids=lambda p: p.stem)
def test_sample_configs_validate(path):
    config = validate(load_config(str(path)), REGISTRY)
    assert config.experiment == path.stem


# =============================================================================
# CONFIG VALIDATION
# =============================================================================

def test_validate_fills_defaults():
    config = validate({"experiment": "digits"}, REGISTRY)
    assert config.params == REGISTRY["digits"].defaults
    assert config.seed == 0 and config.threads == 1 and config.out == "results"


def test_validate_rejects_unknown_fields():
    with pytest.raises(SchemaError, match="unknown config field"):
        validate({"experiment": "digits", "colour": "red"}, REGISTRY)
    with pytest.raises(SchemaError, match="unknown parameter"):
        validate({"experiment": "digits", "params": {"base": 2}}, REGISTRY)


def test_validate_rejects_type_mismatches():
    with pytest.raises(SchemaError):
        validate({"experiment": "digits", "params": {"samples": "many"}}, REGISTRY)
    with pytest.raises(SchemaError):
        validate({"experiment": "digits", "params": {"samples": True}}, REGISTRY)
    with pytest.raises(SchemaError):
        validate({"experiment": "digits", "seed": -1}, REGISTRY)
    with pytest.raises(SchemaError):
        validate({"experiment": "digits", "threads": 0}, REGISTRY)
    config = validate({"experiment": "recurrence-profile", "params": {"epsilon": 0}}, REGISTRY)
    assert config.params["epsilon"] == 0


def test_unknown_experiment_lists_registry():
    with pytest.raises(UnknownExperimentError) as info:
        validate({"experiment": "baker-map"}, REGISTRY)
    assert "folner-density" in str(info.value)
    assert isinstance(info.value, SchemaError)


def test_overrides_and_hash():
    config = validate({"experiment": "lattice-identity"}, REGISTRY)
    same = validate({"experiment": "lattice-identity", "params": {"instances": 1000}}, REGISTRY)
    assert config.sha256() == same.sha256()
    changed = with_overrides(config, seed=9, threads=3, out="elsewhere")
    assert (changed.seed, changed.threads, changed.out) == (9, 3, "elsewhere")
    assert changed.sha256() != config.sha256()
    assert with_overrides(config) is config
    with pytest.raises(SchemaError):
        with_overrides(config, seed=2 ** 64)


def test_load_config_accepts_json5(tmp_path):
    path = tmp_path / "c.json5"
    path.write_text("// comment\n{experiment: 'digits', params: {samples: 3,},}\n", encoding="utf-8")
    assert load_config(str(path)) == {"experiment": "digits", "params": {"samples": 3}}
    path.write_text("{experiment: ", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_config(str(path))
    with pytest.raises(SchemaError):
        load_config(str(tmp_path / "missing.json5"))


# =============================================================================
# RUNS
# =============================================================================

def test_folner_density_row(tmp_path):
    artifacts = run_in(tmp_path, "folner-density", K_ladder=[2, 3])
    table = pd.read_csv(artifacts.csv_path)
    first = table.iloc[0]
    assert (first["K"], first["S_K_size"], first["Q_K"], first["density"]) == (2, 864, 1296, "2/3")
    second = table.iloc[1]
    assert (second["phi_size"], second["phi_min"], second["phi_max"]) == (9, 1296, 46656)
    assert table["exact_match"].all()
    summary = summary_of(artifacts)
    assert summary["version"] == __version__
    assert summary["config"]["params"]["K_ladder"] == [2, 3]
    assert len(summary["config_sha256"]) == 64
    assert summary["results"]["all_exact"] is True


def test_rerun_is_byte_identical(tmp_path):
    first = run_in(tmp_path / "a", "gowers-oracle", sequences=5, N_max=64, expanded_N=[8], pairs=3)
    second = run_in(tmp_path / "b", "gowers-oracle", sequences=5, N_max=64, expanded_N=[8], pairs=3)
    assert first.csv_path.read_bytes() == second.csv_path.read_bytes()
    assert summary_of(first)["results"]["failures"] == {}


def test_concentration_fg_is_exact(tmp_path):
    artifacts = run_in(tmp_path, "concentration-fg", N_ladder=[1000, 5000])
    assert artifacts.result.summary["max_statistic"] == 0


def test_counterexample_archimedean_writes_means(tmp_path):
    artifacts = run_in(tmp_path, "counterexample-archimedean", N_ladder=[2000], means_ladder=[100, 1000])
    assert (tmp_path / "counterexample-archimedean_means.csv").exists()
    assert list(artifacts.result.table.columns) == ["N", "unrestricted", "restricted"]


def test_structural_suites(tmp_path):
    chu = run_in(tmp_path, "chu-inequality", cases=30, homomorphism_pairs=100).result.summary
    assert chu["min_slack"] >= -1e-12
    assert chu["gram_min_eigenvalue"] >= -1e-9
    assert chu["homomorphism_failures"] == 0
    assert chu["isometry_max_gap"] <= 1e-12
    lattice = run_in(tmp_path, "lattice-identity", instances=60).result.summary
    assert lattice["agreements"] == lattice["instances"] == 60


def test_quad_equation(tmp_path):
    artifacts = run_in(tmp_path, "quad-equation", l=2, N=300, random_equations=4)
    summary = artifacts.result.summary
    assert summary["recurrence_forms"]["L1"] == "(1 m + 3 n)"
    assert summary["random_equations_verified"] == "4/4"
    table = artifacts.result.table
    assert table["verified"].all()
    assert (table[["x", "y", "z"]] <= 300).all().all()


def test_small_averages_run(tmp_path):
    omega = run_in(tmp_path, "omega-uniformity", N=200).result
    assert len(omega.table) == 12
    assert omega.summary["contributing_count"] == 200 * 200
    pair = run_in(tmp_path, "mainB-rational", N_ladder=[40, 80]).result
    assert len(pair.summary["cauchy_gaps"]) == 1
    assert pair.summary["counts"]["40"]["excluded_count"] == 40 * 41 // 2
    digits = run_in(tmp_path, "digits", N_ladder=[100], samples=20).result
    assert list(digits.table["N"]) == [100]


def test_katai_run(tmp_path):
    table = run_in(tmp_path, "katai-diagnostic", N=60, sequence_N=2000).result.table
    assert set(table["kind"]) == {"2d", "1d"}
    assert (table["abs"] <= 1 + 1e-12).all()


def test_plot_is_written(tmp_path):
    config = with_overrides(validate({"experiment": "digits", "out": str(tmp_path), "params": {"N_ladder": [50, 100], "samples": 5}}, REGISTRY), plot=True)
    artifacts = run(config)
    assert artifacts.svg_path is not None
    assert artifacts.svg_path.read_text(encoding="utf-8").lstrip().startswith("<?xml")


@pytest.mark.slow
def test_counterexample_dilation(tmp_path):
    summary = run_in(tmp_path, "counterexample-dilation").result.summary
    assert summary["max_measure"] <= 0.01
    assert summary["product_average_max_deviation"] <= 1e-9


@pytest.mark.slow
def test_recurrence_profile_with_q_trick(tmp_path):
    artifacts = run_in(tmp_path, "recurrence-profile")
    summary = artifacts.result.summary
    assert summary["benchmark"] == pytest.approx(0.5 ** 4 - 0.05)
    assert 0.1 <= summary["good_density"] < 1
    per_q = pd.read_csv(tmp_path / "recurrence-profile_per_q.csv")
    assert len(per_q) == 9


def test_recurrence_profile_benchmark_is_positive(tmp_path):
    summary = run_in(tmp_path, "recurrence-profile", N=30, Qs=[1296]).result.summary
    assert summary["benchmark"] == pytest.approx(0.0125)
    assert 0 < summary["good_density"] < 1
