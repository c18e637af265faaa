import io
import json
import random
import string
import sys

import pytest

from groupeq.cli import main, run_command
from groupeq.config import DEFAULT_CAPS
from groupeq.dsl import parse_script
from groupeq.errors import ParseError
from groupeq.report import canonical_json, render_text

UP_SCRIPT = """\
group Z = zn(1)
set X in Z: 0, 1
set Y in Z: 0, 1
"""

EQ_SCRIPT = """\
group A = free(a)
group B = free(b)
group G = A * B
eq E over G: b t b t b t^-1 = 1
"""

GEQ_SCRIPT = """\
group G = free(g, h)
group T = zn(2)
let u = T: (1, 0)
let v = T: (0, 1)
geq W over G with T: g u h v = 1
"""

MV_SCRIPT = """\
group C = cyclic(3)
mveq M over C vars x1, x2: a x1 x2 x1^-1 x2^-1 = 1
"""

FIN_SCRIPT = """\
group C = cyclic(3)
eq E over C: a^2 t^2 = 1
"""


def run(cmd, args, script):
    return run_command(cmd, args, script, DEFAULT_CAPS)


def test_parse_script_declarations():
    sess = parse_script(GEQ_SCRIPT)
    assert set(sess.groups) == {"G", "T"}
    assert set(sess.elements) == {"u", "v"}
    assert set(sess.geqs) == {"W"}


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse_script("group G = free(a)\nbogus statement\n")
    assert err.value.line == 2


def test_duplicate_names_rejected():
    with pytest.raises(ParseError):
        parse_script("group G = free(a)\ngroup G = zn(1)\n")


def test_classify_command():
    script = "group F = free(a)\neq E over F: a t a t^-1 a t = 1\n"
    report, code = run("classify", {}, script)
    assert code == 0
    assert report["result"]["kind"] == "unimodular"
    assert report["result"]["exponent_sum"] == 1
    assert report["result"]["trivial"] is False


def test_up_check_command_exit_codes():
    report, code = run("up-check", {"sets": "X,Y"}, UP_SCRIPT)
    assert code == 0
    assert report["result"]["unique_elements"] == ["0", "2"]
    klein = "group V = finite{0 1 2 3; 1 0 3 2; 2 3 0 1; 3 2 1 0}\nset S in V: 0, 1, 2, 3\n"
    report2, code2 = run("up-check", {"sets": "S,S"}, klein)
    assert code2 == 1
    assert report2["status"] == "falsified"


def test_rewrite_coset_command():
    report, code = run("rewrite-coset", {}, GEQ_SCRIPT)
    assert code == 0
    assert report["result"]["expansion_verified"] is True


def test_normal_form_command():
    report, code = run("normal-form-6", {"split": "0|1"}, EQ_SCRIPT)
    assert code == 0
    assert report["result"]["kind"] == "form6"
    assert (report["result"]["m"], report["result"]["n"]) == (0, 1)


def test_solve_finite_command():
    report, code = run("solve-finite", {}, FIN_SCRIPT)
    assert code == 0
    assert report["result"]["found"] and report["result"]["reverified"]


def test_corollary_command():
    report, code = run("corollary-precheck", {}, MV_SCRIPT)
    assert code == 0
    assert report["result"]["status"] == "corollary-applies"


def test_verdict_command():
    report, code = run("verdict", {}, GEQ_SCRIPT)
    assert code == 0
    assert report["result"]["overall"] == "unimodular"


def test_parse_error_exit_code_two():
    report, code = run("classify", {}, "nonsense line\n")
    assert code == 2
    assert report["status"] == "error"
    assert report["error"]["type"] == "ParseError"


def test_golden_stability_across_runs():
    # deterministic ordering: two runs produce byte-identical reports
    for cmd, args, script in [
        ("classify", {}, EQ_SCRIPT),
        ("up-check", {"sets": "X,Y"}, UP_SCRIPT),
        ("rewrite-coset", {}, GEQ_SCRIPT),
        ("normal-form-6", {"split": "0|1"}, EQ_SCRIPT),
        ("verdict", {}, GEQ_SCRIPT),
        ("emit-ky", {}, GEQ_SCRIPT),
        ("solve-finite", {}, FIN_SCRIPT),
    ]:
        r1, c1 = run(cmd, args, script)
        r2, c2 = run(cmd, args, script)
        assert canonical_json(r1) == canonical_json(r2)
        assert c1 == c2


def test_round_trip_verify(tmp_path):
    report, _ = run("up-check", {"sets": "X,Y"}, UP_SCRIPT)
    path = tmp_path / "report.json"
    path.write_text(canonical_json(report))
    assert main(["verify", str(path)]) == 0
    # a tampered report fails verification
    tampered = dict(report)
    tampered["result"] = dict(report["result"], unique_count=99)
    path.write_text(canonical_json(tampered))
    assert main(["verify", str(path)]) == 1


def test_main_end_to_end(tmp_path, capsys):
    script = tmp_path / "in.ge"
    script.write_text(UP_SCRIPT)
    code = main(["up-check", str(script), "--sets", "X,Y", "--format", "structured"])
    out = capsys.readouterr().out
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "groupeq.report/1"
    code2 = main(["up-check", str(script), "--sets", "X,Y"])
    out2 = capsys.readouterr().out
    assert "unique_elements" in out2 and code2 == 0


def test_render_text_is_derived_from_struct():
    report, _ = run("classify", {}, EQ_SCRIPT)
    text = render_text(report)
    assert "kind: unimodular" in text


def test_dsl_fuzz_never_crashes():
    rng = random.Random(1234)
    vocab = [
        "group", "let", "set", "eq", "geq", "mveq", "over", "with", "in", "vars",
        "=", ":", "free(a)", "zn(2)", "fours", "finite{0}", "perm(2){}", "t",
        "t^-1", "a", "b", "(1, 0)", "#0", "{", "}", "*", ",", "1",
    ]
    for _ in range(2500):
        n = rng.randrange(1, 8)
        parts = []
        for _ in range(n):
            if rng.random() < 0.8:
                parts.append(rng.choice(vocab))
            else:
                parts.append("".join(rng.choice(string.printable[:70]) for _ in range(rng.randrange(1, 6))))
        script = " ".join(parts) + "\n"
        if rng.random() < 0.3:
            script += rng.choice(vocab) + "\n"
        report, code = run("classify", {}, script)
        assert code in (0, 1, 2)
        assert report["status"] in ("ok", "falsified", "error")


def test_cli_fuzz_binary_garbage():
    rng = random.Random(99)
    for _ in range(500):
        blob = "".join(chr(rng.randrange(32, 1000)) for _ in range(rng.randrange(0, 60)))
        report, code = run("up-check", {"sets": "X,Y"}, blob)
        assert code in (0, 1, 2)
