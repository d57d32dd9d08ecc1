"""Measured principal curvatures of tangential congruences vs the closed forms.

For each surface the script prints, per θ, the measured non-trivial
eigenvalues (after a global sign choice), the predicted pair, and the
angle identity ½R̄ + (λ₁+λ₂)² + (λ₁−λ₂)²cos2θ.  It also recomputes the
eigenvalues with an independent oracle: finite-difference second fundamental
form of Φ inside the flat bivector space Λ²R⁴ (no charts, no jets).
"""

import numpy as np

from nullhyper import hypersurface as hs
from nullhyper.families import (
    clifford_torus,
    immersion_tangential,
    tangential_predictions,
    umbilic_sphere,
)
from nullhyper.fd import fd_derivative
from nullhyper.linalg import orthonormal_complement
from nullhyper.models import PLUECKER_FORM


def bivector_oracle(phi, u):
    """Eigenvalues of the shape operator of Φ ⊂ L⁺(S³) ⊂ Λ²R⁴ by finite differences."""
    f = lambda v: np.asarray(phi(v))
    xi = f(u)
    jac = fd_derivative(f, u, 1).value
    hess = fd_derivative(f, u, 2).value
    tq = orthonormal_complement(np.stack([xi, PLUECKER_FORM @ xi], axis=1))
    n = tq @ np.linalg.svd(jac @ tq)[2][-1]
    h = jac @ jac.T
    s = np.einsum("ijc,c->ij", hess, n)
    return np.sort(np.linalg.eigvals(np.linalg.solve(h, s)).real)


def survey(surface, thetas, x=(0.5, 0.9)):
    fam = immersion_tangential(surface)
    print(f"\n{surface.label}  kappa = {surface.kappa}")
    print(f"{'theta':>7} {'measured':>24} {'oracle':>24} {'predicted':>24} {'thm2':>9}")
    for th in thetas:
        u = np.array([x[0], x[1], th])
        model, imm = fam.at(u)
        geo = hs.analyze(imm, model, u)
        sd = hs._shape_data(geo, hs.NULL_TOL)
        ex = sd.extras
        thm2 = hs.angle_identity(ex["lambda1"], ex["lambda2"], ex["cos_theta"], fam.rbar)
        pred = tangential_predictions(surface.kappa, th)["lambdas"]
        orc = bivector_oracle(fam.extras["bivector"], u)
        fmt = lambda v: "[" + ", ".join(f"{a:6.3f}" for a in v) + "]"
        print(f"{th:7.3f} {fmt(sd.lambdas):>24} {fmt(orc):>24} {fmt(pred):>24} {thm2:9.2e}")


def main():
    thetas = np.pi / 8 + np.arange(8) * np.pi / 4
    survey(umbilic_sphere(), thetas)
    survey(umbilic_sphere(np.pi / 3), thetas[:3])
    survey(clifford_torus(), thetas)


if __name__ == "__main__":
    main()
