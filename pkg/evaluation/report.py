# evaluation/report.py
"""
Per-episode result tables, per-cell aggregates and their CSV files
"""
import os

import numpy as np
import pandas as pd

EPISODE_COLUMNS = [
    "density", "penetration", "replication", "seed", "passing_time",
    "collided", "timed_out", "steps", "error",
]
SUMMARY_COLUMNS = [
    "density", "penetration", "mean_passing_time_s", "std_s", "sem_s",
    "n", "collision_rate", "timeout_rate",
]
EPISODES_FILE = "episodes.csv"
SUMMARY_FILE = "summary.csv"


def results_frame(results):
    """EpisodeResult list -> DataFrame; infeasible episodes keep their error text"""
    rows = [r.to_dict() for r in results]
    df = pd.DataFrame(rows, columns=EPISODE_COLUMNS)
    df["passing_time"] = pd.to_numeric(df["passing_time"], errors="coerce")
    return df


def aggregate(results):
    """
    Per (density, penetration) cell: mean/std/standard error of passing time
    over cleared episodes, and collision and timeout rates over all feasible
    episodes of the cell
    """
    df = results if isinstance(results, pd.DataFrame) else results_frame(results)
    if "error" in df:
        df = df[df["error"].isna()]
    if df.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)

    rows = []
    for (density, penetration), cell in df.groupby(["density", "penetration"], sort=True):
        times = cell["passing_time"].dropna()
        std = float(times.std(ddof=1)) if len(times) > 1 else np.nan
        rows.append({
            "density": int(density),
            "penetration": float(penetration),
            "mean_passing_time_s": float(times.mean()) if len(times) else np.nan,
            "std_s": std,
            "sem_s": std / np.sqrt(len(times)) if len(times) > 1 else np.nan,
            "n": int(len(cell)),
            "collision_rate": float(cell["collided"].astype(bool).mean()),
            "timeout_rate": float(cell["timed_out"].astype(bool).mean()),
        })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def passing_time_savings(summary):
    """
    Relative passing-time saving of each cell against the penetration-0
    (all-HV) cell of the same density
    """
    summary = summary.copy()
    baseline = (
        summary[summary["penetration"] == 0.0]
        .set_index("density")["mean_passing_time_s"]
    )
    reference = summary["density"].map(baseline)
    summary["saving"] = 1.0 - summary["mean_passing_time_s"] / reference
    return summary


def report(results, out_dir, verbose=True):
    """
    Write episodes.csv (raw results) and summary.csv (per-cell aggregates)
    under out_dir. Returns both paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    episodes_path = os.path.join(out_dir, EPISODES_FILE)
    summary_path = os.path.join(out_dir, SUMMARY_FILE)

    episodes = results_frame(results)
    summary = aggregate(episodes)
    episodes.to_csv(episodes_path, index=False)
    summary.to_csv(summary_path, index=False)

    if verbose:
        print(f"✓ Episode results saved to {episodes_path}")
        print(f"✓ Summary saved to {summary_path}")
    return episodes_path, summary_path


def load_report(path):
    """Read a report file back with exact float round trip"""
    return pd.read_csv(path, float_precision="round_trip")


def print_summary(summary):
    """Console table of the per-cell aggregates"""
    if summary.empty:
        print("No feasible episodes to summarize")
        return
    print(f"\n{'Density':>8} {'Penetr.':>8} {'Mean (s)':>9} {'SEM':>7} {'n':>4} {'Coll.':>6} {'Timeout':>8}")
    print("-" * 56)
    for _, row in summary.iterrows():
        print(f"{int(row['density']):>8} {row['penetration']:>8.2f} {row['mean_passing_time_s']:>9.2f} "
              f"{row['sem_s']:>7.2f} {int(row['n']):>4} {row['collision_rate']:>6.1%} {row['timeout_rate']:>8.1%}")
