import json

import pytest

from anonlab.cli import main
from anonlab.graph import load_edge_list


def run_cli(args):
    return main(args)


class TestFixturesCommand:
    def test_writes_four_graphs_plus_expectations(self, tmp_path, capsys):
        assert run_cli(["fixtures", "--out", str(tmp_path)]) == 0
        names = {p.name for p in tmp_path.iterdir()}
        assert names == {
            "mirrored_squares.el", "bowtie.el", "uneven_barbell.el",
            "double_broom.el", "expectations.json",
        }
        expect = json.loads((tmp_path / "expectations.json").read_text())
        first = expect["mirrored_squares"]["reports"][0]
        assert first == {"property": "k-symmetry", "k": 2, "l": None, "holds": True}


class TestCheckCommand:
    def test_passing_property_exit_zero(self, tmp_path, capsys):
        run_cli(["fixtures", "--out", str(tmp_path)])
        code = run_cli(["check", "--property", "k-symmetry", "--k", "2",
                        str(tmp_path / "mirrored_squares.el")])
        out = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert code == 0 and out["holds"] is True

    def test_violated_property_exit_one(self, tmp_path, capsys):
        run_cli(["fixtures", "--out", str(tmp_path)])
        code = run_cli(["check", "--property", "kl-anonymity", "--k", "2", "--l", "2",
                        str(tmp_path / "uneven_barbell.el")])
        out = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert code == 1 and out["holds"] is False and out["witness"]

    def test_usage_error_exit_two(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli(["check", "--k", "2", "nowhere.el"])
        assert exc.value.code == 2


class TestGenerateAnonymize:
    def test_generate_manifest(self, tmp_path, capsys):
        code = run_cli(["generate", "--kind", "er", "--n", "12", "--density", "0.4",
                        "--count", "3", "--seed", "7", "--out", str(tmp_path)])
        assert code == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert len(manifest) == 3
        g = load_edge_list(manifest[0]["path"])
        assert g.n == 12

    def test_anonymize_then_check_symmetry(self, tmp_path, capsys):
        run_cli(["generate", "--kind", "er", "--n", "10", "--density", "0.3",
                 "--count", "1", "--seed", "3", "--out", str(tmp_path)])
        src = str(tmp_path / "er_00000.el")
        dst = str(tmp_path / "anon.el")
        vat = str(tmp_path / "vat.json")
        assert run_cli(["anonymize", "--method", "kmatch", "--k", "2",
                        "--seed", "1", src, dst, "--vat", vat]) == 0
        assert run_cli(["check", "--property", "k-symmetry", "--k", "2", dst]) == 0
        table = json.loads(open(vat).read())
        assert len(table["rows"][0]) == 2


class TestAttackOracleCommands:
    @pytest.fixture()
    def bundle(self, tmp_path):
        from anonlab.attack import inject_sybils, pseudonymize
        from anonlab.generators import GeneratorSpec, er_graph, graph_rng
        from anonlab.graph import save_edge_list
        from anonlab.harness import save_environment

        rng = graph_rng(77, 0)
        g = er_graph(GeneratorSpec(kind="er", n=10, rng_seed=6, density=0.3))
        env = inject_sybils(g, 3, [0, 4], rng)
        pub, phi = pseudonymize(env.g_plus, rng)
        orig = tmp_path / "orig.el"
        pubp = tmp_path / "pub.el"
        envp = tmp_path / "env.json"
        save_edge_list(g, orig)
        save_edge_list(pub, pubp)
        save_environment(env, list(phi), str(envp))
        return str(orig), str(pubp), str(envp)

    def test_attack_reports_json(self, bundle, capsys):
        orig, pub, envp = bundle
        assert run_cli(["attack", orig, pub, "--env", envp, "--delta-max", "0"]) == 0
        out = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert out["candidates"] >= 1
        assert 0.0 <= out["success_rate_decimal"] <= 1.0

    def test_oracle_reports_rationals(self, bundle, capsys):
        orig, pub, envp = bundle
        assert run_cli(["oracle", orig, pub, "--env", envp]) == 0
        lines = [json.loads(s) for s in capsys.readouterr().out.strip().splitlines()]
        assert len(lines) == 2  # two victims
        for entry in lines:
            num, _, den = entry["probability"].partition("/")
            assert int(num) >= 0 and (den == "" or int(den) > 0)


class TestExpectationsReplay:
    def test_expected_reports_reproduce(self, tmp_path):
        """The shipped expectations are exactly what the checkers compute."""
        from anonlab.fixtures import EXPECTED, FIXTURES
        from anonlab.privacy import check_property, max_k_degree

        for name, expected in EXPECTED.items():
            g = FIXTURES[name]()
            for entry in expected["reports"]:
                report = check_property(g, entry["property"], entry["k"], entry["l"])
                assert report.holds == entry["holds"], (name, entry)
            if "max_k_degree" in expected:
                assert max_k_degree(g) == expected["max_k_degree"]
            if "max_attack_success" in expected:
                from fractions import Fraction

                from anonlab.oracle import max_attack_success

                spec = expected["max_attack_success"]
                bound = Fraction(spec["at_most"])
                assert max_attack_success(g, spec["l"]) <= bound
