"""Writes AdaPlus transcript fixtures computed in 50-digit decimal arithmetic.

Independent of the C++ kernels and oracle; rerun only if the fixture
streams below change.
"""
from decimal import Decimal as D, getcontext
import sys

getcontext().prec = 50


def adaplus(stream, theta0, lr, b1=D("0.9"), b2=D("0.999"), eps=D("1e-8"), wd=D("0.01")):
    theta = [D(x) for x in theta0]
    m = [D(0)] * len(theta)
    s = [D(0)] * len(theta)
    rows = []
    for t, grads in enumerate(stream, start=1):
        for i, g in enumerate(grads):
            g = D(g)
            th = theta[i] - lr * wd * theta[i]
            m[i] = b1 * m[i] + (1 - b1) * g
            s[i] = b2 * s[i] + (1 - b2) * (g - m[i]) ** 2 + eps
            mbar = b1 * m[i] + (1 - b1) * g
            mhat = mbar / (1 - b1 ** t)
            shat = s[i] / (1 - b2 ** t)
            dtheta = -lr * mhat / (shat.sqrt() + eps)
            theta[i] = th + dtheta
            rows.append((t, i, g, m[i], s[i], mbar, mhat, shat, dtheta, theta[i]))
    return rows


def dump(name, rows, out):
    out.write(f"# {name}\n# t idx g m s mbar mhat shat dtheta theta\n")
    for r in rows:
        out.write(f"{r[0]} {r[1]} " + " ".join(f"{float(v):.17g}" for v in r[2:]) + "\n")


if __name__ == "__main__":
    which = sys.argv[1]
    if which == "single":
        dump("adaplus, theta0=[0], g=[1], lr=1e-3, weight_decay=0",
             adaplus([["1.0"]], ["0.0"], D("1e-3"), wd=D(0)), sys.stdout)
    else:
        stream = [["1.0", "-0.5"], ["0.25", "2.0"], ["-1.5", "0.0"]]
        dump("adaplus, theta0=[0, 1], lr=1e-3, weight_decay=1e-2, three steps",
             adaplus(stream, ["0.0", "1.0"], D("1e-3")), sys.stdout)
