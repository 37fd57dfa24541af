"""Weyl versus anti-Wick position/momentum variances along a coherent family and Fock ladder."""

import numpy as np

from phasequant import Scheme, coherent_state, fock_state, variance_report


def row(label, psi):
    w = variance_report(psi, Scheme.WEYL)
    aw = variance_report(psi, Scheme.ANTIWICK)
    print(f"{label:<18}{w.var_x:9.4f}{w.var_p:9.4f}{w.product:10.4f}{aw.var_x:9.4f}{aw.var_p:9.4f}{aw.product:10.4f}")


def main() -> None:
    print(f"{'state':<18}{'Vx(W)':>9}{'Vp(W)':>9}{'prod(W)':>10}{'Vx(AW)':>9}{'Vp(AW)':>9}{'prod(AW)':>10}")
    for beta in np.linspace(0, 2, 5):
        psi = coherent_state(complex(beta, -0.5 * beta))
        row(f"coherent {beta:.1f}", psi.with_cutoffs(psi.cutoffs[0] + 2))
    for n in range(5):
        row(f"fock {n}", fock_state(n, cutoff=n + 3))


if __name__ == "__main__":
    main()
