"""CLI tests: flags, exit codes, interactive sorting, output determinism."""

import pytest

from probsort.cli import main
from probsort.engine import Algorithm, ComparisonOutcome, new_session


def run_cli(argv):
    return main(argv)


class TestSimulate:
    def test_smallest_matrix(self, tmp_path):
        out = tmp_path / "d"
        code = run_cli([
            "simulate", "--lengths", "8", "--noise", "0", "--algorithms", "merge",
            "--seed", "7", "--runs", "4", "--workers", "1", "--out", str(out),
        ])
        assert code == 0
        assert (out / "curve_MERGE_n008_p000.csv").exists()
        assert (out / "manifest.txt").exists()

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ["simulate", "--lengths", "8", "--noise", "0", "0.1",
                "--algorithms", "merge", "tssort_partner_wover",
                "--seed", "7", "--runs", "3", "--workers", "1"]
        assert run_cli(args + ["--out", str(tmp_path / "a")]) == 0
        assert run_cli(args + ["--out", str(tmp_path / "b")]) == 0
        for p in sorted((tmp_path / "a").glob("curve_*.csv")):
            assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()

    def test_comma_separated_values(self, tmp_path):
        code = run_cli([
            "simulate", "--lengths", "8,16", "--noise", "0", "--algorithms",
            "merge,quick", "--runs", "2", "--workers", "1", "--out", str(tmp_path / "c"),
        ])
        assert code == 0
        assert len(list((tmp_path / "c").glob("curve_*.csv"))) == 4

    def test_invalid_noise_names_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["simulate", "--noise", "1.5", "--out", "x"])
        assert exc.value.code == 2
        assert "--noise" in capsys.readouterr().err

    def test_invalid_algorithm_names_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["simulate", "--algorithms", "heapsort", "--out", "x"])
        assert exc.value.code == 2
        assert "--algorithms" in capsys.readouterr().err

    def test_unknown_flag_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["simulate", "--frobnicate", "--out", "x"])
        assert exc.value.code == 2


class TestSort:
    def _items(self, tmp_path, labels):
        f = tmp_path / "items.txt"
        f.write_text("\n".join(labels) + "\n", encoding="utf-8")
        return str(f)

    def test_two_items_first_always(self, tmp_path, monkeypatch, capsys):
        path = self._items(tmp_path, ["alpha", "beta"])
        answers = iter(["1", "1"])
        monkeypatch.setattr("builtins.input", lambda *a: next(answers))
        assert run_cli(["sort", "--items", path]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l.strip().startswith(("1 ", "2 "))]
        assert "alpha" in lines[0]

    def test_immediate_quit_prints_input_order(self, tmp_path, monkeypatch, capsys):
        path = self._items(tmp_path, ["a", "b", "c"])
        monkeypatch.setattr("builtins.input", lambda *a: "q")
        assert run_cli(["sort", "--items", path]) == 0
        lines = capsys.readouterr().out.splitlines()
        header = next(i for i, l in enumerate(lines) if l.startswith("rank"))
        ranked = [l.split()[1] for l in lines[header + 1 :] if l.strip()]
        assert ranked == ["a", "b", "c"]

    def test_malformed_answers_do_not_consume_budget(self, tmp_path, monkeypatch, capsys):
        path = self._items(tmp_path, ["x", "y"])
        answers = iter(["zzz", "", "3", "1", "1"])
        monkeypatch.setattr("builtins.input", lambda *a: next(answers))
        assert run_cli(["sort", "--items", path]) == 0  # budget 2, needed both answers

    def test_consistent_answers_recover_preference_order(self, tmp_path, monkeypatch, capsys):
        labels = ["it0", "it1", "it2", "it3", "it4", "it5", "it6", "it7"]
        prefs = {"it0": 4, "it1": 7, "it2": 1, "it3": 0, "it4": 6, "it5": 2, "it6": 5, "it7": 3}
        path = self._items(tmp_path, labels)

        # oracle: replay the same policy through a fresh session directly
        oracle = new_session(8, Algorithm.TSSORT_PARTNER_WOVER)
        while not oracle.is_finished():
            pair = oracle.next_pair()
            won = prefs[labels[pair.first_index]] > prefs[labels[pair.second_index]]
            oracle.apply_outcome(
                pair,
                ComparisonOutcome.FIRST_WINS if won else ComparisonOutcome.SECOND_WINS,
            )
        want = [labels[i] for i in oracle.current_order()]
        assert [prefs[l] for l in want] == sorted(prefs.values(), reverse=True)

        state = {"current": None}

        def fake_input(*a):
            first, second = state["current"]
            return "1" if prefs[first] > prefs[second] else "2"

        # capture the printed pair so the fake user can answer consistently
        real_print = print
        import builtins

        def spy_print(*args, **kwargs):
            text = " ".join(str(a) for a in args)
            if text.strip().startswith("1)"):
                state.setdefault("pair", [None, None])
                state["pair"][0] = text.split(")", 1)[1].strip()
            if text.strip().startswith("2)"):
                state["pair"][1] = text.split(")", 1)[1].strip()
                state["current"] = tuple(state["pair"])
            real_print(*args, **kwargs)

        monkeypatch.setattr(builtins, "print", spy_print)
        monkeypatch.setattr(builtins, "input", fake_input)
        assert run_cli(["sort", "--items", path]) == 0
        monkeypatch.setattr(builtins, "print", real_print)

    def test_missing_file_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["sort", "--items", "/no/such/file"])
        assert exc.value.code == 2

    def test_single_item_exits_2(self, tmp_path, capsys):
        path = self._items(tmp_path, ["only"])
        with pytest.raises(SystemExit) as exc:
            run_cli(["sort", "--items", path])
        assert exc.value.code == 2

    def test_blank_lines_ignored(self, tmp_path, monkeypatch, capsys):
        f = tmp_path / "items.txt"
        f.write_text("a\n\n   \nb\n", encoding="utf-8")
        monkeypatch.setattr("builtins.input", lambda *a: "q")
        assert run_cli(["sort", "--items", str(f)]) == 0


class TestServe:
    def test_unwritable_data_dir_exits_1(self, capsys):
        assert run_cli(["serve", "--data-dir", "/proc/1/qq"]) == 1
        assert "not writable" in capsys.readouterr().err

    def test_missing_ui_dir_exits_1(self, tmp_path, capsys):
        code = run_cli([
            "serve", "--data-dir", str(tmp_path), "--ui-dir", str(tmp_path / "missing"),
        ])
        assert code == 1

    def test_busy_port_exits_1(self, tmp_path, capsys):
        import socket

        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            code = run_cli([
                "serve", "--data-dir", str(tmp_path), "--port", str(port),
            ])
        finally:
            blocker.close()
        assert code == 1
        assert "cannot bind" in capsys.readouterr().err
