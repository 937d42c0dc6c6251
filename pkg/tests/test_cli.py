"""CLI contracts: presets, config precedence, CSV/JSON schemas, determinism."""

import csv
import io
import json
import math

import numpy as np
import pytest

from codedmm.cli import (
    PRESETS,
    SWEEP_HEADER,
    TABLE_HEADER,
    ExperimentConfig,
    UsageError,
    main,
)

TABLE_HEADER_LINE = "scheme,N,k,gamma,mu_master,mu_worker,rho,feasible"
SWEEP_HEADER_LINE = (
    "N,scheme,p_opt,k,T_analytic,T_simulated,storage_master,"
    "storage_worker,rho,selected_by_acm2"
)


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def expected_rate(seed, n, support):
    rng = np.random.default_rng(np.random.SeedSequence((seed, n)))
    return support[int(rng.integers(len(support)))]


class TestHeaders:
    def test_table_header_is_fixed(self, capsys):
        code, out, _ = run_cli(["table", "--preset", "table1"], capsys)
        assert code == 0
        assert out.splitlines()[0] == TABLE_HEADER_LINE
        assert ",".join(TABLE_HEADER) == TABLE_HEADER_LINE

    def test_sweep_header_is_fixed(self, capsys):
        code, out, _ = run_cli(
            ["sweep", "--preset", "fig1", "--workers", "6"], capsys
        )
        assert code == 0
        assert out.splitlines()[0] == SWEEP_HEADER_LINE
        assert ",".join(SWEEP_HEADER) == SWEEP_HEADER_LINE

    def test_newline_discipline(self, capsys):
        _, out, _ = run_cli(["table", "--preset", "table1"], capsys)
        assert "\r" not in out
        assert out.endswith("\n")


class TestTable:
    def test_reference_layout(self, capsys):
        code, out, _ = run_cli(["table", "--preset", "table1"], capsys)
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 20
        schemes = [r["scheme"] for r in rows]
        assert schemes == (
            ["product"] * 4
            + ["polynomial"] * 4
            + ["matdot"] * 4
            + ["mds"] * 4
            + ["repetition"] * 4
        )
        by_cell = {(r["scheme"], r["N"]): r for r in rows}
        assert by_cell[("product", "9")]["k"] == "6"
        assert by_cell[("polynomial", "7")]["k"] == "4"
        assert by_cell[("matdot", "8")]["k"] == "3"
        assert by_cell[("mds", "6")]["k"] == "2"
        assert by_cell[("repetition", "8")]["k"] == "5"
        # K=2000: gamma is K^3/4 for the two column-split-both codes, K^3/2 else
        assert by_cell[("product", "9")]["gamma"] == "2000000000"
        assert by_cell[("mds", "6")]["gamma"] == "4000000000"
        assert by_cell[("polynomial", "6")]["mu_worker"] == "5000000"
        assert by_cell[("matdot", "6")]["mu_worker"] == "8000000"

    def test_na_cells_are_empty_and_flagged(self, capsys):
        _, out, _ = run_cli(["table", "--preset", "table1"], capsys)
        rows = parse_csv(out)
        na_cells = {
            (r["scheme"], r["N"]) for r in rows if r["feasible"] == "false"
        }
        assert na_cells == {
            ("product", "6"),
            ("product", "7"),
            ("product", "8"),
            ("repetition", "7"),
            ("repetition", "9"),
        }
        for row in rows:
            if row["feasible"] == "false":
                assert row["k"] == row["gamma"] == row["rho"] == ""
            else:
                assert row["k"] and row["gamma"] and row["rho"]

    def test_square_cluster_grid_row_is_feasible(self, capsys):
        # a 2x2 grid uses all four workers, so N=4 carries a real row
        _, out, _ = run_cli(
            ["table", "--workers", "4", "--phi", "0.9"], capsys
        )
        rows = {r["scheme"]: r for r in parse_csv(out)}
        assert rows["product"]["feasible"] == "true"
        assert rows["product"]["k"] == "4"
        assert rows["repetition"]["feasible"] == "true"

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            ["table", "--preset", "table1", "--format", "json"], capsys
        )
        assert code == 0
        records = json.loads(out)
        assert len(records) == 20
        assert list(records[0]) == sorted(records[0])
        na = [r for r in records if not r["feasible"]]
        assert all(r["rho"] is None for r in na)

    def test_float_cells_use_ten_significant_digits(self, capsys):
        _, out, _ = run_cli(["table", "--preset", "table1"], capsys)
        rows = parse_csv(out)
        rho = next(
            r["rho"] for r in rows if r["scheme"] == "product" and r["N"] == "9"
        )
        assert rho == format(12800 / 19683, ".10g")


class TestSweep:
    def test_six_rows_per_cluster_size(self, capsys):
        _, out, _ = run_cli(
            ["sweep", "--preset", "fig1", "--workers", "6", "7"], capsys
        )
        rows = parse_csv(out)
        assert len(rows) == 12
        assert [r["scheme"] for r in rows[:6]] == [
            "repetition",
            "mds",
            "polynomial",
            "matdot",
            "product",
            "acm2",
        ]

    def test_adaptive_row_duplicates_the_winner(self, capsys):
        _, out, _ = run_cli(["sweep", "--preset", "fig1", "--seed", "3"], capsys)
        rows = parse_csv(out)
        for n in range(6, 21):
            group = [r for r in rows if r["N"] == str(n)]
            adaptive = next(r for r in group if r["scheme"] == "acm2")
            winners = [
                r
                for r in group
                if r["scheme"] != "acm2" and r["selected_by_acm2"] == "1"
            ]
            assert len(winners) == 1
            winner = winners[0]
            for column in SWEEP_HEADER:
                if column == "scheme":
                    continue
                assert adaptive[column] == winner[column]

    def test_adaptive_time_is_the_pointwise_minimum(self, capsys):
        _, out, _ = run_cli(["sweep", "--preset", "fig1", "--seed", "3"], capsys)
        rows = parse_csv(out)
        for n in range(6, 21):
            group = [r for r in rows if r["N"] == str(n)]
            times = [
                float(r["T_analytic"])
                for r in group
                if r["scheme"] != "acm2" and r["T_analytic"] != ""
            ]
            adaptive = next(r for r in group if r["scheme"] == "acm2")
            assert float(adaptive["T_analytic"]) == min(times)

    def test_grid_code_wins_square_clusters(self, capsys):
        _, out, _ = run_cli(["sweep", "--preset", "fig1", "--seed", "3"], capsys)
        rows = parse_csv(out)
        for n in ("9", "16"):
            row = next(
                r for r in rows if r["N"] == n and r["scheme"] == "product"
            )
            assert row["selected_by_acm2"] == "1"

    def test_rate_draw_matches_the_documented_stream(self, capsys):
        seed = 11
        _, out, _ = run_cli(
            ["sweep", "--preset", "fig1", "--seed", str(seed), "--workers", "9"],
            capsys,
        )
        rows = parse_csv(out)
        lam = expected_rate(seed, 9, PRESETS["fig1"]["lam_support"])
        expected = (1 + math.log(3) / lam) / 9
        adaptive = next(r for r in rows if r["scheme"] == "acm2")
        assert adaptive["T_analytic"] == format(expected, ".10g")
        assert adaptive["p_opt"] == "3"

    def test_constrained_preset_leaves_infeasible_rows_empty(self, capsys):
        _, out, _ = run_cli(["sweep", "--preset", "fig3", "--seed", "1"], capsys)
        rows = parse_csv(out)
        small = [r for r in rows if int(r["N"]) < 10]
        assert small
        for row in small:
            assert row["p_opt"] == ""
            assert row["T_analytic"] == ""
            assert row["selected_by_acm2"] == "0"
        chosen = {
            r["scheme"]
            for r in rows
            if r["scheme"] != "acm2" and r["selected_by_acm2"] == "1"
        }
        assert chosen == {"matdot", "polynomial"}

    def test_simulated_column(self, capsys):
        _, out, _ = run_cli(
            [
                "sweep",
                "--preset",
                "fig1",
                "--workers",
                "6",
                "--seed",
                "2",
                "--simulate",
                "--trials",
                "400",
            ],
            capsys,
        )
        rows = parse_csv(out)
        for row in rows:
            if row["T_analytic"]:
                assert row["T_simulated"] != ""
                assert float(row["T_simulated"]) > 0
            else:
                assert row["T_simulated"] == ""

    def test_unsimulated_column_stays_empty(self, capsys):
        _, out, _ = run_cli(
            ["sweep", "--preset", "fig1", "--workers", "6"], capsys
        )
        rows = parse_csv(out)
        assert all(r["T_simulated"] == "" for r in rows)


class TestDeterminism:
    def test_sweep_bytes_are_stable(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            code, out, _ = run_cli(
                [
                    "sweep",
                    "--preset",
                    "fig2",
                    "--seed",
                    "9",
                    "--out",
                    str(path),
                ],
                capsys,
            )
            assert code == 0
            assert out == ""
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_seed_changes_the_rate_draws(self, capsys):
        _, first, _ = run_cli(["sweep", "--preset", "fig1", "--seed", "1"], capsys)
        _, second, _ = run_cli(["sweep", "--preset", "fig1", "--seed", "2"], capsys)
        assert first != second

    def test_simulated_sweep_bytes_are_stable(self, tmp_path, capsys):
        texts = []
        for _ in range(2):
            _, out, _ = run_cli(
                [
                    "sweep",
                    "--preset",
                    "fig1",
                    "--workers",
                    "8",
                    "9",
                    "--seed",
                    "5",
                    "--simulate",
                    "--trials",
                    "300",
                ],
                capsys,
            )
            texts.append(out)
        assert texts[0] == texts[1]

    def test_simulate_json_is_stable(self, capsys):
        args = [
            "simulate",
            "--scheme",
            "product",
            "--partitions",
            "2",
            "--workers",
            "9",
            "--lam",
            "2",
            "--phi",
            "0.9",
            "--trials",
            "2000",
            "--seed",
            "21",
        ]
        _, first, _ = run_cli(args, capsys)
        _, second, _ = run_cli(args, capsys)
        assert first == second
        payload = json.loads(first)
        assert payload["scheme"] == "product"
        assert payload["trials"] == 2000


class TestSelect:
    def test_one_shot_selection(self, capsys):
        code, out, _ = run_cli(
            [
                "select",
                "--workers",
                "9",
                "--lam",
                "5",
                "--phi",
                "0.95",
                "--k-dim",
                "2000",
                "--l-dim",
                "5000",
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["scheme"] == "product"
        assert payload["partitions"] == 3
        assert payload["k"] == 9
        assert payload["feasible_set_size"] == 18
        assert list(payload) == sorted(payload)

    def test_infeasible_selection_exits_one(self, capsys):
        code, out, _ = run_cli(
            [
                "select",
                "--workers",
                "6",
                "--lam",
                "1",
                "--phi",
                "0.5",
                "--rho-thr",
                "0.999",
            ],
            capsys,
        )
        assert code == 1
        payload = json.loads(out)
        assert "no feasible code" in payload["error"]
        assert payload["reasons"]

    def test_select_needs_one_cluster_size(self, capsys):
        code, _, err = run_cli(
            ["select", "--workers", "6", "7", "--lam", "1"], capsys
        )
        assert code == 2
        assert "exactly one" in err

    def test_select_needs_one_rate(self, capsys):
        code, _, err = run_cli(
            ["select", "--workers", "6", "--lam-support", "1", "2"], capsys
        )
        assert code == 2
        assert "single straggling rate" in err


class TestSimulate:
    def test_requires_scheme(self, capsys):
        code, _, err = run_cli(
            ["simulate", "--workers", "6", "--lam", "1"], capsys
        )
        assert code == 2
        assert "--scheme" in err

    def test_rejects_infeasible_code(self, capsys):
        code, _, err = run_cli(
            [
                "simulate",
                "--scheme",
                "repetition",
                "--partitions",
                "4",
                "--workers",
                "6",
                "--lam",
                "1",
            ],
            capsys,
        )
        assert code == 2
        assert "does not divide" in err

    def test_mean_tracks_the_exact_expectation(self, capsys):
        code, out, _ = run_cli(
            [
                "simulate",
                "--scheme",
                "mds",
                "--partitions",
                "2",
                "--workers",
                "10",
                "--lam",
                "2",
                "--phi",
                "1.0",
                "--trials",
                "20000",
                "--seed",
                "4",
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        # exact mean for k=2 of 10: (1 + (H_10 - H_8)/2) / 2
        h10 = sum(1 / i for i in range(1, 11))
        h8 = sum(1 / i for i in range(1, 9))
        exact = (1 + (h10 - h8) / 2) / 2
        assert payload["mean_completion"] == pytest.approx(exact, rel=0.03)
        assert payload["undecodable_fraction"] == 0.0


class TestVerify:
    def test_full_battery_passes(self, capsys):
        code, out, _ = run_cli(
            ["verify", "--trials", "20000", "--seed", "0"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["ok"] is True
        assert payload["summary"]["fail"] == 0
        assert payload["summary"]["known-discrepancy"] == 1
        names = {c["name"]: c["status"] for c in payload["checks"]}
        assert names["table-grid-cell-reference"] == "known-discrepancy"
        assert names["decode-round-trip"] == "pass"

    def test_reduced_trials_widen_instead_of_failing(self, capsys):
        code, out, _ = run_cli(
            ["verify", "--trials", "100", "--seed", "0"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["ok"] is True
        statuses = {c["name"]: c["status"] for c in payload["checks"]}
        assert statuses["order-statistic-agreement"] == "inconclusive"
        assert statuses["failure-model-agreement"] == "inconclusive"

    def test_verdicts_are_seed_invariant(self, capsys):
        verdicts = []
        for seed in ("0", "1", "2"):
            _, out, _ = run_cli(
                ["verify", "--trials", "20000", "--seed", seed], capsys
            )
            payload = json.loads(out)
            verdicts.append([c["status"] for c in payload["checks"]])
        assert verdicts[0] == verdicts[1] == verdicts[2]


class TestConfigResolution:
    def test_config_file_feeds_the_run(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {
                    "n_values": [6, 7, 8, 9],
                    "k_dim": 2000,
                    "l_dim": 2000,
                    "phi": 2 / 3,
                    "partitions": 2,
                }
            )
        )
        _, from_file, _ = run_cli(["table", "--config", str(config)], capsys)
        _, from_preset, _ = run_cli(["table", "--preset", "table1"], capsys)
        assert from_file == from_preset

    def test_flags_override_config_file(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"preset": "table1", "phi": 0.5}))
        _, overridden, _ = run_cli(
            ["table", "--config", str(config), "--phi", str(2 / 3)], capsys
        )
        _, reference, _ = run_cli(["table", "--preset", "table1"], capsys)
        assert overridden == reference
        _, halved, _ = run_cli(["table", "--config", str(config)], capsys)
        assert halved != reference

    def test_preset_flag_overrides_config_preset(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"preset": "fig1"}))
        _, out, _ = run_cli(
            ["table", "--config", str(config), "--preset", "table1"], capsys
        )
        _, reference, _ = run_cli(["table", "--preset", "table1"], capsys)
        assert out == reference

    def test_empty_cluster_range_is_a_usage_error(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"n_values": []}))
        code, _, err = run_cli(["table", "--config", str(config)], capsys)
        assert code == 2
        assert "empty N range" in err

    def test_unknown_config_key_is_a_usage_error(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"n_values": [6], "lambda": 2}))
        code, _, err = run_cli(["table", "--config", str(config)], capsys)
        assert code == 2
        assert "unknown config keys" in err

    def test_missing_cluster_sizes_is_a_usage_error(self, capsys):
        code, _, err = run_cli(["table"], capsys)
        assert code == 2
        assert "no cluster sizes" in err

    def test_bad_rate_is_a_usage_error(self, capsys):
        code, _, err = run_cli(
            ["sweep", "--workers", "6", "--lam", "-1"], capsys
        )
        assert code == 2
        assert "positive" in err

    def test_config_dataclass_validates(self):
        with pytest.raises(UsageError):
            ExperimentConfig(n_values=())
        with pytest.raises(UsageError):
            ExperimentConfig(n_values=(6,), trials=0)
        with pytest.raises(UsageError):
            ExperimentConfig(n_values=(6,), fmt="yaml")

    def test_out_writes_the_file(self, tmp_path, capsys):
        target = tmp_path / "table.csv"
        code, out, _ = run_cli(
            ["table", "--preset", "table1", "--out", str(target)], capsys
        )
        assert code == 0
        assert out == ""
        assert target.read_text().splitlines()[0] == TABLE_HEADER_LINE

    def test_unwritable_out_is_reported(self, tmp_path, capsys):
        code, _, err = run_cli(
            [
                "table",
                "--preset",
                "table1",
                "--out",
                str(tmp_path / "missing" / "t.csv"),
            ],
            capsys,
        )
        assert code == 2
        assert "cannot write" in err
