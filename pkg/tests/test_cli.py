import json
import subprocess
import sys

import pytest

from mhecke import harness
from mhecke.cli import ConfigError, RunConfig, main, parse_config_text


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "xdg"))
    monkeypatch.delenv("MHECKE_CONFIG", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    obj = json.loads(out)
    assert obj["schema"] == "1"
    return code, obj


def all_leaves(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from all_leaves(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from all_leaves(v)
    else:
        yield obj


# -- subcommands ------------------------------------------------------------

def test_pd(capsys):
    code, obj = run_json(capsys, "--terms", "6", "pd", "--D", "5")
    assert code == 0
    assert obj["series"]["coeffs"][:2] == ["1", "-sqrt(5)"]


def test_expand_and_reconstruct_round_trip(capsys, tmp_path):
    code, obj = run_json(capsys, "--terms", "8", "expand", "--form", "borcherds:13:4:7", "--D", "13")
    assert code == 0
    assert obj["exponents"]["c"][:3] == ["-6", "42", "2750"]
    path = tmp_path / "pe.json"
    path.write_text(json.dumps(obj))
    code, rec = run_json(capsys, "reconstruct", "--exponents", str(path))
    assert code == 0
    code, direct = run_json(capsys, "--terms", "8", "expand", "--form", "borcherds:13:4:7", "--series")
    assert rec["series"]["coeffs"] == direct["series"]["coeffs"]


def test_hecke_on_delta(capsys):
    # Delta = q prod (1 - q^n)^24 and Delta|T~(3) = Delta^4
    code, via_exp = run_json(capsys, "--terms", "12", "hecke", "--form", "delta", "--n", "3")
    assert code == 0
    assert via_exp["exponents"]["h"] == "4" and set(via_exp["exponents"]["c"]) == {"96"}
    code, eig = run_json(capsys, "--terms", "12", "hecke", "--form", "delta", "--eigen", "2,3")
    assert code == 0 and eig["eigenform"] is True


def test_hecke_level11(capsys):
    code, obj = run_json(capsys, "--terms", "12", "hecke", "--form", "level11", "--n", "3",
                         "--N", "11", "--D", "8")
    assert code == 0
    assert obj["exponents"]["c"][:3] == ["-9*sqrt(2)", "-288*sqrt(2)", "11742*sqrt(2)"]


def test_classes(capsys):
    code, obj = run_json(capsys, "classes", "--d", "52", "--N", "7", "--D", "13")
    assert code == 0
    assert sorted(cl["beta"] for cl in obj["class_lists"]) == ["12", "2"]
    assert all(len(cl["reps"]) == 2 for cl in obj["class_lists"])


def test_classes_bounded_search_needs_beta(capsys):
    code, _, err = run(capsys, "classes", "--d", "52", "--N", "7", "--bound", "100")
    assert code == 2 and "--beta" in err


def test_trace(capsys):
    code, obj = run_json(capsys, "trace", "--D", "13", "--d", "4", "--N", "7", "--fn", "faber:3")
    assert code == 0
    assert obj["trace"]["recognized"] == "8244"


def test_verify_paper_only_and_groups(capsys):
    code, obj = run_json(capsys, "verify-paper", "--only", "classes")
    assert code == 0
    assert obj["total"] == "4" and obj["passed"] == "4"
    assert {c["id"] for c in obj["checks"]} == {"classes.52.+2", "classes.52.-2", "classes.468.+6",
                                                "classes.468.-6"}


def test_verify_paper_full_run(capsys):
    code, out, _ = run(capsys, "verify-paper")
    assert code == 0
    assert out.strip().splitlines()[-1] == "24/24 checks passed"


def test_verify_paper_reports_failures_with_exit_1(capsys, monkeypatch):
    real = harness.checks

    def broken():
        out = real()
        bad = harness.Check("fake.fail", "fake", "always fails", "x", lambda cfg: ("y", False))
        return out + [bad]

    monkeypatch.setattr(harness, "checks", broken)
    monkeypatch.setattr(harness, "GROUPS", harness.GROUPS + ("fake",))
    code, out, _ = run(capsys, "verify-paper", "--only", "fake")
    assert code == 1 and out.startswith("FAIL")


def test_unknown_only_is_a_usage_error(capsys):
    code, _, err = run(capsys, "verify-paper", "--only", "nonsense")
    assert code == 2 and "nonsense" in err


# -- exit codes -----------------------------------------------------------

def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["pd"])
    assert exc.value.code == 2
    assert run(capsys, "--prec", "10", "pd", "--D", "5")[0] == 2
    assert run(capsys, "--terms", "2", "pd", "--D", "5")[0] == 2
    assert run(capsys, "pd", "--D", "9")[0] == 2
    assert run(capsys, "expand", "--form", "nosuchform")[0] == 2
    assert run(capsys, "classes", "--d", "5", "--N", "7")[0] == 2


def test_precision_failure_exit_code(capsys):
    fn = '{"type":"scale","c":"1/7","f":{"type":"faber","level":7,"n":1}}'
    code, _, err = run(capsys, "trace", "--D", "13", "--d", "4", "--N", "7", "--fn", fn)
    assert code == 3 and "precision" in err


# -- configuration ----------------------------------------------------------

def test_config_text_parsing():
    cfg = parse_config_text("# comment\nterms = 30\nprec=512\ndiscriminants = 5, 8 13\nlevel = 7\n"
                            "cache = off\noutput = json\n")
    assert (cfg.terms, cfg.prec, cfg.discriminants, cfg.level, cfg.cache_dir, cfg.output) == \
        (30, 512, (5, 8, 13), 7, None, "json")
    for bad in ("terms", "colour = red", "terms = many", "cache = maybe"):
        with pytest.raises(ConfigError):
            parse_config_text(bad)
    with pytest.raises(ConfigError):
        RunConfig(output="xml", cache_dir=None).validate()


def test_config_file_and_environment(capsys, tmp_path, monkeypatch):
    conf = tmp_path / "mhecke.conf"
    conf.write_text(f"terms = 5\noutput = json\ncache_dir = {tmp_path / 'c'}\n")
    code, out, _ = run(capsys, "--config", str(conf), "pd", "--D", "5")
    assert code == 0 and len(json.loads(out)["series"]["coeffs"]) == 5
    monkeypatch.setenv("MHECKE_CONFIG", str(conf))
    code, out, _ = run(capsys, "pd", "--D", "5")
    assert len(json.loads(out)["series"]["coeffs"]) == 5
    # flags beat the file, before or after the subcommand
    code, out, _ = run(capsys, "pd", "--D", "5", "--terms", "7")
    assert len(json.loads(out)["series"]["coeffs"]) == 7
    monkeypatch.setenv("MHECKE_CONFIG", str(tmp_path / "missing.conf"))
    assert run(capsys, "pd", "--D", "5")[0] == 2


def test_unwritable_cache_dir_is_a_config_error(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "--cache-dir", str(blocker / "sub"), "pd", "--D", "5")
    assert code == 2 and "--no-cache" in err


# -- cache and determinism --------------------------------------------------

def test_cache_hit_and_cold_run_agree(capsys, tmp_path):
    cache = tmp_path / "cache"
    args = ("--cache-dir", str(cache), "classes", "--d", "468", "--N", "7", "--D", "13")
    _, cold = run_json(capsys, *args)
    files = sorted(cache.glob("*.json"))
    assert files
    _, warm = run_json(capsys, *args)
    _, nocache = run_json(capsys, "--no-cache", *args[2:])
    assert cold == warm == nocache


def test_corrupt_cache_is_rebuilt(capsys, tmp_path):
    cache = tmp_path / "cache"
    args = ("--cache-dir", str(cache), "classes", "--d", "52", "--N", "7", "--beta", "2")
    _, good = run_json(capsys, *args)
    (path,) = cache.glob("*.json")
    path.write_text("{not json")
    _, again = run_json(capsys, *args)
    assert again == good
    assert json.loads(path.read_text())["schema"] == "1"


def test_json_is_deterministic_and_stringly(capsys):
    outs = [run(capsys, "--json", "--no-cache", "verify-paper", "--only", "traces")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    obj = json.loads(outs[0])
    assert all(isinstance(v, (str, bool)) or v is None for v in all_leaves(obj))


def test_timings_only_on_request(capsys):
    _, obj = run_json(capsys, "--no-cache", "verify-paper", "--only", "level9.cusp")
    assert all("runtime_ms" not in c for c in obj["checks"])
    _, obj = run_json(capsys, "--no-cache", "verify-paper", "--only", "level9.cusp", "--timings")
    assert all("runtime_ms" in c for c in obj["checks"])


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mhecke.cli", "--no-cache", "--terms", "5", "pd", "--D", "8"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "q^1: -2*sqrt(2)"
