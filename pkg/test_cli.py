#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CLI Tests
"""

import json

import pandas as pd
import pytest

from multact_lab import EXIT_COMPUTATION, EXIT_OK, EXIT_SCHEMA, main
from numtheory import get_default_table, load_factor_table


def write_config(tmp_path, text, name="config.json5"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_list_prints_registry(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "folner-density" in out
    assert "katai-diagnostic" in out
    assert len(out.strip().splitlines()) == 19


def test_run_writes_artifacts(tmp_path):
    config = write_config(tmp_path, "{experiment: 'folner-density', params: {K_ladder: [2]}}")
    out = tmp_path / "out"
    assert main(["run", config, "--out", str(out), "--seed", "11", "--threads", "1"]) == EXIT_OK
    table = pd.read_csv(out / "folner-density.csv")
    assert table.loc[0, "S_K_size"] == 864
    summary = json.loads((out / "folner-density.json").read_text(encoding="utf-8"))
    assert summary["seed"] == 11
    assert summary["config"]["out"] == str(out)


def test_unknown_experiment_exits_2(tmp_path, caplog):
    config = write_config(tmp_path, "{experiment: 'no-such-thing'}")
    assert main(["run", config]) == EXIT_SCHEMA
    assert "folner-density" in caplog.text


def test_schema_errors_exit_2(tmp_path):
    assert main(["run", write_config(tmp_path, "{experiment: 'digits', params: {bogus: 1}}")]) == EXIT_SCHEMA
    assert main(["run", write_config(tmp_path, "{experiment: ", "broken.json5")]) == EXIT_SCHEMA
    assert main(["run", str(tmp_path / "missing.json5")]) == EXIT_SCHEMA


def test_computation_error_exits_1(tmp_path):
    config = write_config(tmp_path, "{experiment: 'concentration-fg', params: {b: 0, N_ladder: [10]}}")
    assert main(["run", config, "--out", str(tmp_path / "out")]) == EXIT_COMPUTATION


def test_sieve_cache_roundtrip(tmp_path):
    cache = tmp_path / "spf.bin"
    assert main(["sieve", "--limit", "5000", "--sieve-cache", str(cache)]) == EXIT_OK
    table = load_factor_table(str(cache))
    assert table.limit == 5000
    assert table.spf[4999] == 4999 and table.spf[4998] == 2

    config = write_config(tmp_path, "{experiment: 'lattice-identity', params: {instances: 5}}")
    assert main(["run", config, "--out", str(tmp_path / "out"), "--sieve-cache", str(cache)]) == EXIT_OK
    assert get_default_table() is None


def test_bad_sieve_cache_exits_1(tmp_path):
    cache = tmp_path / "junk.bin"
    cache.write_bytes(b"not a sieve")
    config = write_config(tmp_path, "{experiment: 'lattice-identity', params: {instances: 5}}")
    assert main(["run", config, "--sieve-cache", str(cache), "--out", str(tmp_path / "out")]) == EXIT_COMPUTATION


def test_subcommand_is_required():
    with pytest.raises(SystemExit):
        main([])
