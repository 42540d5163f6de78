#!/usr/bin/env python3
"""Check data/covas_desk.config against its aggregate targets and derive the
noise drop probability.

    PYTHONPATH=build/python python3 scripts/derive_covas_desk.py [--write]

The delay and branch parameters were set by hand and checked with this script.
The drop probability is found by bisection over replay fitness. --write stores
the result back into the config.
"""

import argparse
import pathlib
import re
import sys

import pmkit

ROOT = pathlib.Path(__file__).resolve().parent.parent
CONFIG = ROOT / "data" / "covas_desk.config"

TARGET_FITNESS = 0.98
HOURS = 3600.0


def report(name, value, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {name}: {value}")
    return ok


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write", action="store_true", help="update noise.drop_probability in the config")
    args = ap.parse_args()

    text = CONFIG.read_text()
    cfg = pmkit.parse_sim_config(text)
    log = pmkit.simulate(cfg)

    stats = pmkit.log_stats(log)
    waves = pmkit.compare_waves(log, "2020-07-01T00:00:00Z")
    occ = pmkit.occupancy(log)
    w1 = waves["first"]["mean_case_duration_seconds"] / HOURS
    w2 = waves["second"]["mean_case_duration_seconds"] / HOURS

    ok = True
    ok &= report("cases", stats["cases"], stats["cases"] == 216)
    ok &= report("wave cases", (waves["first"]["cases"], waves["second"]["cases"]),
                 (waves["first"]["cases"], waves["second"]["cases"]) == (133, 63))
    ok &= report("events per case", round(stats["mean_events_per_case"], 3),
                 abs(stats["mean_events_per_case"] - 7.6) <= 0.2)
    ok &= report("wave 1 mean hours", round(w1, 2), abs(w1 - 798) <= 12)
    ok &= report("wave 2 mean hours", round(w2, 2), abs(w2 - 553) <= 12)
    ok &= report("ventilation peak", occ["peak"], occ["peak"] and occ["peak"][1] == 39
                 and occ["peak"][0].startswith("2020-04-13"))
    clean = pmkit.replay_log(pmkit.covas_model(), log)["fitness"]
    ok &= report("pre-noise fitness", clean, clean == 1.0)

    p, fitness = pmkit.calibrate_drop_probability(log, TARGET_FITNESS, cfg.noise_seed)
    p = round(p, 4)
    noisy = pmkit.replay_log(pmkit.covas_model(), pmkit.inject_noise(log, p, cfg.noise_seed))["fitness"]
    ok &= report(f"fitness at drop probability {p}", round(noisy, 4), abs(noisy - TARGET_FITNESS) <= 0.01)

    if args.write:
        updated = re.sub(r"(?m)^noise\.drop_probability = .*$", f"noise.drop_probability = {p}", text)
        CONFIG.write_text(updated)
        print(f"wrote noise.drop_probability = {p}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
