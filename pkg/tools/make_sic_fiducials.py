"""Generate Weyl-Heisenberg SIC fiducials and refine them to high precision.

Not part of the library. The shipped files under
``src/symdefect/data/sic`` were produced with::

    python tools/make_sic_fiducials.py 4 16 --out src/symdefect/data/sic

A double-precision frame-potential minimisation finds a candidate, then a
Gauss-Newton iteration in mpmath polishes every overlap to ~1e-45.
"""
import argparse
import json
from pathlib import Path

import mpmath as mp
import numpy as np
from scipy.optimize import minimize


def overlaps(psi):
    d = len(psi)
    omega = np.exp(2j * np.pi * np.arange(d) / d)
    out = np.empty((d, d), complex)
    for s in range(d):
        prod = np.conj(np.roll(psi, -s)) * psi
        out[s] = [np.sum(prod * omega ** t) for t in range(d)]
    return out


def potential(x, d):
    psi = x[:d] + 1j * x[d:]
    psi = psi / np.linalg.norm(psi)
    return np.sum(np.abs(overlaps(psi)) ** 4)


def search(d, rng, starts=2000):
    target = 2 * d / (d + 1)
    for _ in range(starts):
        x0 = rng.standard_normal(2 * d)
        res = minimize(potential, x0, args=(d,), method="BFGS", options={"gtol": 1e-12})
        if res.fun - target < 1e-10:
            psi = res.x[:d] + 1j * res.x[d:]
            psi /= np.linalg.norm(psi)
            return psi * np.exp(-1j * np.angle(psi[0]))
    raise RuntimeError(f"no fiducial found for d={d}")


def refine(psi, dps=80, iters=12):
    mp.mp.dps = dps
    d = len(psi)
    omega = [mp.expjpi(mp.mpf(2 * t) / d) for t in range(d)]
    x = [mp.mpf(float(v.real)) for v in psi] + [mp.mpf(float(v.imag)) for v in psi]
    target = mp.mpf(1) / (d + 1)
    for _ in range(iters):
        z = [mp.mpc(x[k], x[d + k]) for k in range(d)]
        rows, res = [], []
        for s in range(d):
            for t in range(d):
                if s == 0 and t == 0:
                    continue
                a = mp.fsum(mp.conj(z[(j + s) % d]) * omega[(t * j) % d] * z[j] for j in range(d))
                res.append(abs(a) ** 2 - target)
                grad = []
                for part in (0, 1):
                    for m in range(d):
                        da = mp.conj(z[(m + s) % d]) * omega[(t * m) % d]
                        db = omega[(t * (m - s)) % d] * z[(m - s) % d]
                        g = da + db if part == 0 else 1j * (da - db)
                        grad.append(2 * mp.re(mp.conj(a) * g))
                rows.append(grad)
        rows.append([2 * v for v in x])
        res.append(mp.fsum(v * v for v in x) - 1)
        rows.append([0] * d + [1] + [0] * (d - 1))
        res.append(x[d])
        J = mp.matrix(rows)
        r = mp.matrix(res)
        step = mp.lu_solve(J.T * J, J.T * r)
        x = [x[k] - step[k] for k in range(2 * d)]
        if mp.norm(r, mp.inf) < mp.mpf(10) ** (-(dps - 20)):
            break
    return [mp.mpc(x[k], x[d + k]) for k in range(d)], mp.norm(r, mp.inf)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("dmin", type=int)
    ap.add_argument("dmax", type=int)
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for d in range(args.dmin, args.dmax + 1):
        psi = search(d, rng)
        fid, resid = refine(psi)
        doc = {
            "d": d,
            "N": 1,
            "accuracy": "1e-40",
            "labels": [f"sic-fiducial-{d}"],
            "source": "frame-potential search + Gauss-Newton refinement (tools/make_sic_fiducials.py)",
            "entries": [[mp.nstr(mp.re(c), 45, min_fixed=-1, max_fixed=1),
                         mp.nstr(mp.im(c), 45, min_fixed=-1, max_fixed=1)] for c in fid],
        }
        path = args.out / f"d{d:02d}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(d, "residual", mp.nstr(resid, 3), flush=True)


if __name__ == "__main__":
    main()
