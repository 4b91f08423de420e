"""Why the quaternion kernel denoises harder than the real one.

Both estimators start from the same idea: a Gram matrix of edge-vector
products ("Gram edge kernel") whose factorization returns the edge
vectors themselves.  The real kernel stores only inner products, so its
noiseless rank is 3 (one per spatial dimension).  Packing each edge into
a quaternion lets the kernel keep every pairwise product in a single
entry, and the noiseless rank drops to 1.

Truncating a noisy kernel back to its noiseless rank is the denoising
step, and cutting to rank 1 throws away much more noise than cutting to
rank 3.  This script builds both kernels for one noiseless network and
prints their spectra side by side.
"""

import numpy as np

from qdsmds.kernel import build_quat_gek, build_real_gek, exact_observation_table
from qdsmds.netgeom import NetworkLayout, enumerate_edges, true_edges
from qdsmds.quatlin import quat_hermitian_eigensystem
from qdsmds.simcli import DEFAULT_ANCHORS, DEFAULT_ROOM, sample_targets


def main() -> None:
    anchors = np.asarray(DEFAULT_ANCHORS)
    targets = sample_targets(seed=2024, trial=0, n_targets=6, room=DEFAULT_ROOM)
    layout = NetworkLayout(anchors, targets)
    edges = enumerate_edges(layout.n_anchors, layout.n_targets)
    v, _ = true_edges(layout, edges)
    print(f"network: {layout.n_anchors} anchors, {layout.n_targets} targets, "
          f"{edges.size} measurable edges\n")

    table = exact_observation_table(v)

    real = build_real_gek(table.distances, table.adoa)
    evals = np.linalg.eigvalsh(real.data)[::-1]
    print("real kernel eigenvalues (largest first):")
    print("  " + "  ".join(f"{x:10.3e}" for x in evals[:6]) + "  ...")
    significant = int((evals > 1e-9 * evals.sum()).sum())
    print(f"  eigenvalues above 1e-9 * trace: {significant}\n")

    quat = build_quat_gek(table)
    values, _ = quat_hermitian_eigensystem(quat.as_quat_matrix())
    mags = np.sort(np.abs(values))[::-1]
    print("quaternion kernel singular values (largest first):")
    print("  " + "  ".join(f"{x:10.3e}" for x in mags[:6]) + "  ...")
    print(f"  sv1 equals the sum of squared edge lengths: "
          f"{mags[0]:.6e} vs {np.sum(table.distances ** 2):.6e}")
    print(f"  sv2 / sv1 = {mags[1] / mags[0]:.2e}")
    print("\nrank 3 vs rank 1: the quaternion factorization concentrates the"
          "\nsame geometry into a single dominant eigenpair.")


if __name__ == "__main__":
    main()
