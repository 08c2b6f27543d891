#!/usr/bin/env python3
"""Writes the hand-built fixtures and the constructor fixtures into fixtures/.

Usage: tools/make_fixtures.py BUILD_DIR
"""
import json
import pathlib
import subprocess
import sys
from fractions import Fraction as F

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"


def p(x):
    x = F(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rows(table):
    return [{"vector": [list(c) for c in vec], "p": p(w)} for vec, w in table]


def per_step(questions, answers, *steps):
    return {"questions": questions, "answers": answers, "mode": "per-step", "steps": [rows(t) for t in steps]}


def hold(questions, answers, table, horizon=3):
    return {
        "questions": questions,
        "answers": answers,
        "horizon": horizon,
        "mode": "kernel",
        "init": rows(table),
        "kernel": [{"from": [list(c) for c in vec], "to": rows([(vec, 1)])} for vec, w in table if w > 0],
        "kappa": 0,
    }


def dist(pairs):
    return [{"answers": list(a), "p": p(w)} for a, w in pairs]


def scenario(sms1, checks, **extra):
    s = {"schema": 1, "sms1": sms1}
    s.update(extra)
    s.setdefault("divergence", "kl")
    s.setdefault("epsilon", 0)
    s.setdefault("step", 1)
    s["checks"] = [{"name": n, "args": a} for n, a in checks]
    return s


def write(name, s):
    (OUT / f"{name}.json").write_text(json.dumps(s, indent=2) + "\n")


# Coin with hold: one question answered 0 or 1 at step 1, repeated forever.
FIX_A_TABLE = [([("qa", "0")], F(1, 2)), ([("qa", "1")], F(1, 2))]
# Three vectors at one step, each 1/3.
FIX_B_TABLE = [
    ([("qa", "0"), ("qb", "1")], F(1, 3)),
    ([("qa", "0")], F(1, 3)),
    ([("qb", "0")], F(1, 3)),
]


def fix_a():
    write("fix_a", scenario(hold(["qa"], ["0", "1"], FIX_A_TABLE),
                            [("validate", {}), ("nonrepeating", {"k": 0}), ("backward_consistent", {"kappa": 0})]))


def fix_b():
    write("fix_b", scenario(per_step(["qa", "qb"], ["0", "1"], FIX_B_TABLE), [("validate", {})]))


def coin_reasoner():
    # The coin at step 1, plus a prediction question p that is always answered 1.
    table = [([("qa", "0"), ("p", "1")], F(1, 2)), ([("qa", "1"), ("p", "1")], F(1, 2))]
    return per_step(["qa", "p"], ["0", "1"], table)


def calibration_fixture(name, interp):
    oracle = hold(["qa", "p"], ["0", "1"], FIX_A_TABLE)
    psi = {"map": {"qa": ["qa"], "p": ["qa"]}, "invertible": False}
    checks = [
        ("prediction_pair", {"q": "qa", "C": []}),
        ("calibration", {"q": "qa", "C": []}),
        ("honest", {"sms": "sms2", "q": "p", "v": "1", "C": []}),
    ]
    write(name, scenario(oracle, checks, sms2=coin_reasoner(), psi=psi, Psi=interp, epsilon=0.7))


def sc_id():
    interp = [
        {"questions": ["qa"], "answer": "0", "dist": dist([(["0"], 1), (["1"], 0)])},
        {"questions": ["qa"], "answer": "1", "dist": dist([(["0"], 0), (["1"], 1)])},
    ]
    calibration_fixture("sc_id", interp)


def sc_hon():
    half = dist([(["0"], F(1, 2)), (["1"], F(1, 2))])
    interp = [
        {"questions": ["qa"], "answer": "0", "dist": half},
        {"questions": ["qa"], "answer": "1", "dist": half},
    ]
    calibration_fixture("sc_hon", interp)


def fix_emb():
    universe_table = [
        ([("qa", "0"), ("qb", "1")], F(1, 3)),
        ([("qa", "0"), ("qb", "0")], F(1, 3)),
        ([("qa", "1"), ("qb", "0")], F(1, 3)),
    ]
    universe = hold(["qa", "qb"], ["0", "1"], universe_table)
    scientist = per_step(["qa"], ["0", "1"], [([("qa", "0")], F(2, 3)), ([("qa", "1")], F(1, 3))])
    # E restricts every subset of a universe support set to its qa claims.
    table = {}
    for vec, _ in universe_table:
        for mask in range(1 << len(vec)):
            sub = tuple(sorted(vec[i] for i in range(len(vec)) if mask >> i & 1))
            table[sub] = [list(c) for c in sub if c[0] == "qa"]
    E = [{"from": [list(c) for c in k], "to": v} for k, v in sorted(table.items())]
    psi = {"map": {"qa": ["qb"]}, "invertible": True}
    interp = [
        {"questions": ["qb"], "answer": "0", "dist": dist([(["0"], F(1, 2)), (["1"], F(1, 2))])},
        {"questions": ["qb"], "answer": "1", "dist": dist([(["0"], 1), (["1"], 0)])},
    ]
    checks = [
        ("embedding", {}),
        ("embedded_prediction_pair", {"q": "qa", "C": []}),
        ("embed_calibration", {"q": "qa", "C": []}),
    ]
    write("fix_emb", scenario(universe, checks, sms2=scientist, psi=psi, Psi=interp, E=E))


def evidence_fixture(name, given_target):
    # q = 2a + b with a, b independent fair bits; e1 tracks a and e2 tracks b (P(e = 1) is 3/4 when the
    # tracked bit is 1, else 1/4), independently unless q = 3, where the pair law is given_target.
    # Foundation b = 1 is always present.
    table = []
    for v in range(4):
        a, b = v >> 1, v & 1
        for x1 in (0, 1):
            for x2 in (0, 1):
                if v == 3:
                    w = given_target[(x1, x2)]
                else:
                    w = F(3 if x1 == a else 1, 4) * F(3 if x2 == b else 1, 4)
                vec = [("b", "1"), ("q", str(v)), ("e1", str(x1)), ("e2", str(x2))]
                table.append((vec, F(1, 4) * w))
    sms = per_step(["b", "q", "e1", "e2"], ["0", "1", "2", "3"], table)
    args = {"q": "q", "target": "3", "beta": [["b", "1"]], "paths": [[["e1", "1"]], [["e2", "1"]]], "sms": "sms1"}
    checks = [("evidence_collection", args), ("nonthwarting", args), ("derive_monotone", args)]
    write(name, scenario(sms, checks))


def fix_ev():
    # Given q = 3 the two answers agree more often than independence would give.
    evidence_fixture("fix_ev", {(1, 1): F(10, 16), (1, 0): F(2, 16), (0, 1): F(2, 16), (0, 0): F(2, 16)})


def fix_thwart():
    # Given q = 3 the two answers mostly disagree.
    evidence_fixture("fix_thwart", {(1, 0): F(7, 16), (0, 1): F(7, 16), (1, 1): F(1, 16), (0, 0): F(1, 16)})


def fix_ab():
    # 2x2 joint over (qs, qd), both always asked, P(1, 1) = 3/2 * P(qs = 1) * P(qd = 1).
    joint = {(1, 1): F(3, 8), (1, 0): F(1, 8), (0, 1): F(1, 8), (0, 0): F(3, 8)}
    table = [([("qs", str(x)), ("qd", str(y))], w) for (x, y), w in sorted(joint.items())]
    write("fix_ab", scenario(per_step(["qs", "qd"], ["0", "1"], table), [("validate", {})]))


def construct(build, kind, seed, name):
    subprocess.run([str(build / "smslab"), "construct", "--kind", kind, "--seed", str(seed), "--out",
                    str(OUT / f"{name}.json")], check=True, stderr=subprocess.DEVNULL)


def broken_p81():
    # The p81 fixture with an independent joint (lift factor 1): oracle and Psi agree, the premise fails.
    s = json.loads((OUT / "fix_p81.json").read_text())
    px = next(F(e["dist"][1]["p"]) for e in s["Psi"] if e["questions"] == ["x"])
    py = next(F(e["dist"][1]["p"]) for e in s["Psi"] if e["questions"] == ["y"])
    cell = {("0", "0"): (1 - px) * (1 - py), ("0", "1"): (1 - px) * py, ("1", "0"): px * (1 - py), ("1", "1"): px * py}
    for e in s["Psi"]:
        if e["questions"] == ["x", "y"]:
            e["dist"] = dist([((i, j), cell[(i, j)]) for i, j in sorted(cell)])
    for row in s["sms1"]["init"]:
        claims = dict(row["vector"])
        row["p"] = p(cell[(claims["x"], claims["y"])])
    write("broken_p81", s)


def main():
    build = pathlib.Path(sys.argv[1]).resolve()
    OUT.mkdir(exist_ok=True)
    fix_a()
    fix_b()
    sc_id()
    sc_hon()
    fix_emb()
    fix_ev()
    fix_thwart()
    fix_ab()
    construct(build, "p73", 1, "fix_p73")
    construct(build, "p74", 1, "fix_p74")
    construct(build, "p75", 1, "fix_p75")
    construct(build, "p81", 2, "fix_p81")
    construct(build, "p82", 2, "fix_p82")
    construct(build, "p83", 4, "fix_p83")
    construct(build, "projection", 1, "projection")
    broken_p81()


if __name__ == "__main__":
    main()
