from __future__ import annotations

import json
from pathlib import Path

import pytest

from ramify.cli import EXIT_FAILED, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Run every command in an empty directory with no RAMIFY_* variables."""
    monkeypatch.chdir(tmp_path)
    for name in ("P", "N", "VARIANT", "SEED", "OUTPUT", "KMAX"):
        monkeypatch.delenv(f"RAMIFY_{name}", raising=False)


def _records(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_main_cohomology_prints_table(capsys: pytest.CaptureFixture[str]) -> None:
    """The default tame place at p = 5 has dimensions (1, 2, 1)."""
    # Act
    status = main(["cohomology"])

    # Assert
    out = capsys.readouterr().out
    assert status == EXIT_OK
    assert out.startswith("[cohomology]")
    assert "(1, 2, 1)" in out


def test_main_cohomology_ordinary_records(capsys: pytest.CaptureFixture[str]) -> None:
    """With trivial star the ordinary place gains an invariant and H1_ord = 2."""
    # Act
    status = main(
        [
            "cohomology",
            "--place",
            "ordinary",
            "--star",
            "trivial",
            "--output",
            "records",
        ]
    )

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert record["dims"] == [1, 4, 0]
    assert record["h1_ord"] == 2
    assert record["schema_version"] == "1"


def test_main_tame_adjust_worked_example(capsys: pytest.CaptureFixture[str]) -> None:
    """diag(17, 21) mod 25 is repaired by alpha = 4."""
    # Act
    status = main(["tame", "--action", "adjust", "--output", "records"])

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert record["alpha"] == 4
    assert record["special"] is True
    assert record["sigma"] == [7, 0, 0, 1]


def test_main_tame_basis_agrees_with_bruteforce(
    capsys: pytest.CaptureFixture[str],
) -> None:
    """The closed-form cocycle space matches enumeration."""
    # Act
    status = main(["tame", "--output", "records", "--p", "7"])

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert (record["z1"], record["b1"], record["h1"]) == (4, 2, 2)
    assert record["brute_force"]["z1"] == 4


def test_main_section_search_budget_is_partial(
    capsys: pytest.CaptureFixture[str],
) -> None:
    """An exhausted budget exits with the partial status and a partial record."""
    # Act
    status = main(
        ["groups", "section-search", "--budget", "10", "--output", "records"]
    )

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_PARTIAL
    assert record["record"] == "partial"
    assert record["total"] == 390625


def test_main_section_search_split_finds_section(
    capsys: pytest.CaptureFixture[str],
) -> None:
    """The diagonal torus has a section."""
    # Act
    status = main(["groups", "section-search", "--split", "--output", "records"])

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert record["result"] == "SectionFound"
    assert record["passed"] is True
    assert len(record["witness"]) == 2


def test_main_section_search_gl2_section_fails(
    capsys: pytest.CaptureFixture[str],
) -> None:
    """A section of GL2 (trivially found mod p) is a failed check with timing."""
    # Act
    status = main(
        ["groups", "section-search", "--level", "1", "--output", "records"]
    )

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_FAILED
    assert record["result"] == "SectionFound"
    assert record["passed"] is False
    assert record["elapsed"] >= 0


@pytest.mark.slow
def test_main_section_search_gl2_has_no_section(
    capsys: pytest.CaptureFixture[str],
) -> None:
    """The full search mod 25 finds no section and passes."""
    # Act
    status = main(["groups", "section-search", "--output", "records"])

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert record["result"] == "NoSection"
    assert record["examined"] == record["total"] == 390625
    assert "elapsed" in record


@pytest.mark.parametrize("variant", ["uncond", "grh"])
def test_main_orders_checks_variant(
    variant: str, capsys: pytest.CaptureFixture[str]
) -> None:
    """uncond elements have order 20; grh matrices are special only below the top."""
    # Act
    status = main(
        ["groups", "orders", "--variant", variant, "--k", "1", "--output", "records"]
    )

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert record["variant"] == variant
    if variant == "uncond":
        assert record["order"] == 20
    else:
        assert record["special_mod_below"] and not record["special_mod_top"]


def test_main_orders_reads_variant_from_environment(
    monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    """RAMIFY_VARIANT applies when --variant is absent."""
    # Arrange
    monkeypatch.setenv("RAMIFY_VARIANT", "grh")

    # Act
    main(["groups", "orders", "--output", "records"])

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert record["variant"] == "grh"


def test_main_centralizers(capsys: pytest.CaptureFixture[str]) -> None:
    """One more layer divides d = 1/100 by p."""
    # Act
    status = main(["groups", "centralizers", "--output", "records"])

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert record["centralizer_order"] == 5
    assert record["extended_density"] == "1/500"


def test_main_lift_verifies_and_replays_saved_model(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """A generated lift verifies, and its saved model reproduces the outputs."""
    # Arrange
    model_path = tmp_path / "out" / "model.json"
    trace_path = tmp_path / "out" / "trace.jsonl"

    # Act
    first = main(
        [
            "lift",
            "--kmax",
            "2",
            "--verify",
            "--output",
            "records",
            "--save-model",
            str(model_path),
            "--trace",
            str(trace_path),
        ]
    )
    generated = _records(capsys.readouterr().out)
    second = main(["lift", "--model", str(model_path), "--output", "records"])
    replayed = _records(capsys.readouterr().out)

    # Assert
    assert first == second == EXIT_OK
    assert generated[-1]["record"] == "verify"
    assert generated[-1]["ok"] is True
    outputs = [record for record in generated if record["record"] == "stage_output"]
    assert [(r["prime"], r["u_valuation"]) for r in outputs] == [
        ("l1", 1),
        ("l1", 1),
        ("l2", 2),
    ]
    assert outputs == [r for r in replayed if r["record"] == "stage_output"]
    assert json.loads(trace_path.read_text().splitlines()[0])["record"] == "header"


def test_main_lift_rejects_invalid_model(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """A model that fails validation is a usage error."""
    # Arrange
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps({"p": 5, "N": 8, "variant": "uncond", "classes": []}),
        encoding="utf-8",
    )

    # Act
    status = main(["lift", "--model", str(path)])

    # Assert
    assert status == EXIT_USAGE
    assert "Model validation failed" in capsys.readouterr().err


def test_main_lift_rejects_missing_model_file(tmp_path: Path) -> None:
    """An unreadable model path is a usage error."""
    # Act + Assert
    assert main(["lift", "--model", str(tmp_path / "absent.json")]) == EXIT_USAGE


def test_main_rejects_overflowing_precision(capsys: pytest.CaptureFixture[str]) -> None:
    """p^N beyond the integer budget is refused before any work."""
    # Act
    status = main(["cohomology", "--N", "28"])

    # Assert
    assert status == EXIT_USAGE
    assert "ramify: error" in capsys.readouterr().err


def test_main_density_short_grid_fails(capsys: pytest.CaptureFixture[str]) -> None:
    """Without a crossover on the grid the counting check fails."""
    # Act
    status = main(
        ["density", "--grid-limit", "3", "--x", "100", "--output", "records"]
    )

    # Assert
    records = _records(capsys.readouterr().out)
    assert status == EXIT_FAILED
    assert [record["record"] for record in records] == [
        "split_density",
        "lo_bound",
        "counting",
    ]
    assert records[0]["zero_density"] == "1/500"
    assert records[-1]["verdict"] == "not_reached"


def test_main_density_reaches_contradiction(capsys: pytest.CaptureFixture[str]) -> None:
    """The default constants reach the contradiction."""
    # Act
    status = main(["density"])

    # Assert
    assert status == EXIT_OK
    out = capsys.readouterr().out
    assert "verdict" in out
    assert "not_reached" not in out


def test_main_simulate_without_p(capsys: pytest.CaptureFixture[str]) -> None:
    """With P(0) = 0 the simulation is exact."""
    # Act
    status = main(["simulate", "--size", "40", "--p-infinite", "--output", "records"])

    # Assert
    (record,) = _records(capsys.readouterr().out)
    assert status == EXIT_OK
    assert record["symmetric_fraction"] == 1.0
    assert record["p"] is None
