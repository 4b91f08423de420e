"""The two measurement error models, checked against their definitions.

Distances: multiplicative Gamma noise with the true distance as mean and
a chosen sigma_d as standard deviation, so ranging error grows with the
measured quantity and stays positive.

Angles: additive Tikhonov (von Mises) noise.  Its concentration rho is
awkward to reason about directly, so experiments specify epsilon, the
half-width of the interval around the true angle that captures 90% of
the error mass.  calibrate_rho inverts epsilon -> rho numerically.
"""

import numpy as np

from qdsmds.noise import calibrate_rho, sample_gamma_distance, sample_tikhonov_angle


def main() -> None:
    gen = np.random.default_rng(7)
    n = 200_000

    print("Gamma ranging noise (mean d, std sigma_d):")
    for d, sigma in ((10.0, 0.5), (10.0, 2.0), (3.0, 1.0)):
        draws = sample_gamma_distance(d, sigma, gen, size=n)
        print(f"  d = {d:5.1f} m, sigma_d = {sigma:4.1f} m  ->  "
              f"sample mean {draws.mean():7.4f}, sample std {draws.std():6.4f}, "
              f"min {draws.min():6.4f} (never negative)")

    print("\nepsilon -> rho calibration (central 90% mass inside +/- epsilon):")
    for eps in (10.0, 20.0, 30.0, 40.0, 50.0):
        rho = calibrate_rho(eps)
        draws = sample_tikhonov_angle(np.zeros(n), rho, gen)
        bound = np.degrees(np.quantile(np.abs(draws), 0.9))
        print(f"  epsilon = {eps:4.1f} deg  ->  rho = {rho:8.4f}   "
              f"empirical 90% bound = {bound:5.2f} deg")

    print("\nsmall rho approaches the uniform circle, large rho pins the angle:")
    for rho in (0.0, 1.0, 100.0):
        draws = sample_tikhonov_angle(np.full(n, 0.7), rho, gen)
        print(f"  rho = {rho:6.1f}  ->  std of angle error = "
              f"{np.degrees(np.std(draws - 0.7)):7.3f} deg")


if __name__ == "__main__":
    main()
