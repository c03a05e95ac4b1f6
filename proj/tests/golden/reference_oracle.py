"""Independent oracle for the exponents of a config file.

Uses a dual (log-partition) solver for the convex problems and a multistart
softmax-parameterised search for E2. Writes reference_exponents.json.

    python3 reference_oracle.py ../../configs/reference.json > reference_exponents.json
"""
import itertools
import json
import sys

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp


def load(path):
    cfg = json.load(open(path))
    def arr(p):
        return np.array(p["weights"], float).reshape([a["size"] for a in p["axes"]]), [a["label"] for a in p["axes"]]
    src, src_ax = arr(cfg["source"])
    alt, alt_ax = arr(cfg["alt"])
    ch = cfg["channel"]
    sizes = [a["size"] for a in ch["from"]] + [a["size"] for a in ch["to"]]
    w = np.array(ch["rows"], float).reshape(sizes)
    return cfg, src, src_ax, alt, alt_ax, w


def xz(table, axes, j):
    keep = (axes.index("X"), axes.index("Z%d" % j))
    drop = tuple(i for i in range(len(axes)) if i not in keep)
    return table.sum(axis=drop)


def H(t, axes_keep, axes_given):
    """Entropy in bits of a table over (x,y0,y1,y2,z)."""
    def marg(keep):
        if not keep:
            return np.array([1.0])
        drop = tuple(i for i in range(5) if i not in keep)
        return t.sum(axis=drop).ravel()
    def h(v):
        v = v[v > 0]
        return -(v * np.log2(v)).sum()
    return h(marg(sorted(set(axes_keep) | set(axes_given)))) - h(marg(sorted(axes_given)))


def iproj(ref, feats):
    """min D(pi||ref) s.t. marginal constraints; feats = list of (axes, target)."""
    rows, b = [], []
    for axes, target in feats:
        idx = np.indices(ref.shape).reshape(5, -1)
        key = np.ravel_multi_index(idx[list(axes)], target.shape)
        for c in range(target.size):
            rows.append((key == c).astype(float))
            b.append(target.ravel()[c])
    A, b = np.array(rows), np.array(b)
    r = ref.ravel()
    sup = r > 0
    lr = np.log(r[sup])
    As = A[:, sup]

    def dual(lam):
        s = lr + As.T @ lam
        lz = logsumexp(s)
        g = As @ np.exp(s - lz) - b
        return lz - lam @ b, g

    res = minimize(dual, np.zeros(len(b)), jac=True, method="BFGS", options={"gtol": 1e-13, "maxiter": 100000})
    s = lr + As.T @ res.x
    pi = np.zeros_like(r)
    pi[sup] = np.exp(s - logsumexp(s))
    resid = np.abs(A @ pi - b).max()
    if resid > 1e-6:
        return float("inf")
    m = pi > 0
    return float((pi[m] * np.log2(pi[m] / r[m])).sum())


def exponents(src, src_ax, alt, alt_ax, w, rates, j):
    pxz = xz(src, src_ax, j)
    qxz = xz(alt, alt_ax, j)
    ref = np.einsum("xz,xabc->xabcz", qxz, w)
    p = np.einsum("xz,xabc->xabcz", pxz, w)
    pxy = p.sum(axis=4)
    pz = p.sum(axis=(0, 1, 2, 3))
    other = 3 - j
    py0yjz = p.sum(axis=(0, 1 + other))
    e0 = iproj(ref, [((0, 1, 2, 3), pxy), ((1, 1 + j, 4), py0yjz)])
    div1 = iproj(ref, [((0, 1, 2, 3), pxy), ((4,), pz)])
    R, Rt = rates["R"], rates["Rt"]
    surplus = []
    for S in ([0], [j], [0, j]):
        Sc = [i for i in (0, j) if i not in S]
        h = H(p, [1 + i for i in S], [4] + [1 + i for i in Sc])
        surplus.append(sum(R[i] + Rt[i] for i in S) - h)
    e1 = div1 + min(surplus)

    subsets = [S for k in (1, 2, 3) for S in itertools.combinations(range(3), k)]
    lref = np.where(ref > 0, np.log2(np.maximum(ref, 1e-300)), -np.inf)

    ln2 = np.log(2.0)

    def hcond_grad(pi, S):
        """H_pi(Y_S|X) and its gradient in pi."""
        drop = tuple(i for i in range(1, 5) if i - 1 not in S)
        pxs = pi.sum(axis=drop, keepdims=True)
        px = pi.sum(axis=(1, 2, 3, 4), keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            lxs = np.where(pxs > 0, np.log2(pxs), 0.0)
            lx = np.where(px > 0, np.log2(px), 0.0)
        h = -(pxs * lxs).sum() + (px * lx).sum()
        return h, np.broadcast_to(lx - lxs, pi.shape)

    def obj(theta):
        lg = theta.reshape(16, pz.size)
        lg = lg - logsumexp(lg, axis=0)
        cond = np.exp(lg)  # pi(x,y | z)
        pi = (cond * pz).reshape(ref.shape)
        lpi = np.log2(np.maximum(pi, 1e-300))
        d = (pi * (lpi - lref)).sum()
        gpi = lpi - lref + 1.0 / ln2
        vals = [hcond_grad(pi, S) for S in subsets]
        k = int(np.argmin([v[0] - sum(Rt[i] for i in S) for v, S in zip(vals, subsets)]))
        br = vals[k][0] - sum(Rt[i] for i in subsets[k])
        if br > 0:
            gpi = gpi + 0.5 * vals[k][1]
        g = gpi.reshape(16, pz.size)
        gt = pz * cond * (g - (cond * g).sum(axis=0))
        return d + 0.5 * max(br, 0.0), gt.ravel()

    rng = np.random.default_rng(12345)
    best = np.inf
    starts = [np.log(np.maximum(ref / ref.sum(axis=(0, 1, 2, 3)), 1e-12)).ravel(),
              np.log(np.maximum(p / p.sum(axis=(0, 1, 2, 3)), 1e-12)).ravel()]
    starts += [rng.normal(size=16 * pz.size) for _ in range(32)]
    for s0 in starts:
        res = minimize(obj, s0, jac=True, method="L-BFGS-B", options={"maxiter": 20000, "ftol": 1e-15, "gtol": 1e-11})
        best = min(best, res.fun)
    return e0, e1, best


def main():
    cfg, src, src_ax, alt, alt_ax, w = load(sys.argv[1])
    out = []
    for j in (1, 2):
        e0, e1, e2 = exponents(src, src_ax, alt, alt_ax, w, cfg["rates"], j)
        out.append({"j": j, "e0": e0, "e1": e1, "e2": e2, "theta_star": min(e0, e1, e2)})
    json.dump({"config": sys.argv[1].split("/")[-1], "records": out}, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
