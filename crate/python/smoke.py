"""Smoke test for the Python bindings.

Build first:  cargo build --release -p asmlam-py --features extension-module
Then run:     python3 python/smoke.py
"""

import importlib.machinery
import importlib.util
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import asmlam_py  # installed or on PYTHONPATH

        return asmlam_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        so = ROOT / "target" / profile / "libasmlam_py.so"
        if so.exists():
            loader = importlib.machinery.ExtensionFileLoader("asmlam_py", str(so))
            spec = importlib.util.spec_from_loader("asmlam_py", loader)
            mod = importlib.util.module_from_spec(spec)
            loader.exec_module(mod)
            return mod
    sys.exit("asmlam_py not built; see the module docstring")


def main():
    am = load()
    src = (ROOT / "crates/core/machines/euclid.asm").read_text()
    m = am.Machine.parse(src)

    outcome, steps, traj = m.run({"a0": "12", "b0": "8"})
    assert steps == 2, (outcome, steps)
    assert m.outputs({"a0": "12", "b0": "8"}) == ["4"]
    assert traj[0] == "a=12 b=8"

    cm = m.compile()
    ok, rounds, report = cm.verify({"a0": "12", "b0": "8"})
    assert ok, report
    assert rounds == 3
    assert f"K = {cm.k}" in cm.manifest()

    t = am.Term.parse(r"#not ((\x. x) [True])")
    nf, beta, f = t.reduce()
    assert (beta, f) == (1, 1)
    assert nf.value() == "False"
    assert am.Term.code("(1, True)").value() == "(1, True)"

    assert any(row.startswith("curry") for row in am.audit())
    try:
        am.Machine.parse("program nonsense(")
    except ValueError:
        pass
    else:
        raise AssertionError("bad source accepted")
    print("smoke ok: gcd(12, 8) = 4, lockstep (K,L) =", (cm.k, cm.l))


if __name__ == "__main__":
    main()
