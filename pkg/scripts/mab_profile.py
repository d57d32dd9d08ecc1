"""Principal curvatures of M_ab along ⟨x,a⟩ and the failure of R̄ = −8λ₁λ₂."""

import numpy as np

from nullhyper import hypersurface as hs
from nullhyper.families import immersion_mab, mab_lambda


def main():
    fam = immersion_mab()
    print(f"{'<x,a>':>7} {'lambda1':>10} {'predicted':>10} {'H':>10} {'-8l1l2':>9} {'Rbar':>5}")
    for c in (0.0, 0.1, 0.3, 0.5, 1 / np.sqrt(2), 0.8):
        u = fam.extras["point_with"](c)
        model, imm = fam.at(u)
        sd = hs.shape_operator(imm, model, u)
        l1, l2 = sd.extras["lambda1"], sd.extras["lambda2"]
        print(f"{c:7.3f} {l1:10.6f} {mab_lambda(c):10.6f} {sd.mean_h:10.2e} {-8 * l1 * l2:9.4f} "
              f"{fam.rbar:5.1f}")


if __name__ == "__main__":
    main()
