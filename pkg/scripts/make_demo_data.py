"""Generate a self-contained demo dataset.

Writes the synthetic routes, a scripted driver run projected onto the
roundabout stations, and a noisy GPS+IMU log of that run.  The emitted
files feed the command-line workflow directly:

    python scripts/make_demo_data.py --out demo_data
    ridecomfort reconstruct --gps demo_data/gps.csv --imu demo_data/imu.csv \
        --outages demo_data/outages.json --out results
"""

import argparse
import os

from ridecomfort.kinematics import profile_to_csv
from ridecomfort.reconstruction import save_sensor_log
from ridecomfort.route import save_route
from ridecomfort.synthetic import (
    human_like_truth,
    roundabout_route,
    sample_profile_at_stations,
    simulate_sensor_log,
    straight_route,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="demo_data", help="output directory")
    parser.add_argument("--seed", type=int, default=7, help="sensor noise seed")
    parser.add_argument("--imu-lag", type=float, default=0.13,
                        help="injected IMU clock lag, seconds")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)

    roundabout = roundabout_route()
    save_route(roundabout, os.path.join(args.out, "roundabout.json"))
    save_route(straight_route(length=1200.0, spacing=40.0, v_max=16.7),
               os.path.join(args.out, "straight.json"))

    truth = human_like_truth()
    human = sample_profile_at_stations(truth, roundabout)
    profile_to_csv(human, os.path.join(args.out, "human_run.csv"))

    log = simulate_sensor_log(truth, seed=args.seed, imu_lag=args.imu_lag)
    save_sensor_log(
        log,
        os.path.join(args.out, "gps.csv"),
        os.path.join(args.out, "imu.csv"),
        os.path.join(args.out, "outages.json"),
    )

    print(f"wrote demo inputs to {args.out}/")
    print(f"  scripted run: {human.total_time:.1f} s over {len(human)} stations")
    print(f"  sensor log: {len(log.gps_t)} GPS fixes, {len(log.imu_t)} IMU samples, "
          f"outage {log.outage_windows[0][0]:.0f}-{log.outage_windows[0][1]:.0f} s, "
          f"IMU lag {args.imu_lag:.2f} s")


if __name__ == "__main__":
    main()
