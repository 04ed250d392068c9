"""Independent reference for election_table.csv under --impute uniform.

Reads results.csv and cycles.json with the standard library, resolves every
race (uncontested winners get 0.65, contested Democratic ties 0.505), and
writes the table at display precision to stdout.

usage: oracle_table.py RESULTS CYCLES [TAUS]
"""

import csv
import json
import math
import sys
from collections import defaultdict


def default_cycle(year):
    return str(year - (year - 2) % 10)


def cycle_for(cycles, state, chamber, year):
    for span in cycles.get(f"{state}:{chamber}", []):
        if span["first_year"] <= year <= span["last_year"]:
            return span["cycle_id"]
    return default_cycle(year)


def fixed(v, decimals):
    if v is None:
        return ""
    s = f"{v:.{decimals}f}"
    if s.startswith("-") and set(s[1:]) <= set("0."):
        s = s[1:]
    return s


def tau_label(t):
    return f"{t:g}" if t != int(t) else str(int(t))


def metrics(shares, taus):
    p = sorted(shares)
    n = len(p)
    lost = [x for x in p if x <= 0.5]
    won = [x for x in p if x > 0.5]
    k, kp = len(lost), len(won)
    dec = None
    if k and kp:
        y_bar = sum(lost) / k
        z_bar = sum(won) / kp
        # angle between the two party lines through G = (k/N, 1/2)
        theta_p = math.atan2(2 * z_bar - 1, kp / n)
        theta_q = math.atan2(1 - 2 * y_bar, k / n)
        dec = 2 * (theta_p - theta_q) / math.pi
    wasted = 0.0
    for x in p:
        wasted += (x - 0.5) - (1 - x) if x > 0.5 else x - (0.5 - x)
    eg = wasted / n
    gaps = []
    for t in taus:
        e = t + 1
        wp = wq = 0.0
        for x in p:
            a = abs(2 * x - 1)
            w = a**e / e
            if x > 0.5:
                wp += w
                wq += 1 / e - w
            else:
                wq += w
                wp += 1 / e - w
        gaps.append((wp - wq) / (wp + wq))
    mean = sum(p) / n
    median = p[n // 2] if n % 2 else (p[n // 2 - 1] + p[n // 2]) / 2
    return {
        "n": n,
        "dec": dec,
        "dn": None if dec is None else dec * n / 2,
        "dt": None if dec is None else dec * math.log(n) / 2,
        "eg": eg,
        "gaps": gaps,
        "mm": mean - median,
        "seat": kp / n,
        "vote": mean,
    }


def main():
    results, cycles_path = sys.argv[1], sys.argv[2]
    taus = [float(t) for t in (sys.argv[3] if len(sys.argv) > 3 else "0,0.4,1,2").split(",")]
    with open(cycles_path) as f:
        cycles = json.load(f)
    groups = defaultdict(list)
    with open(results, newline="") as f:
        for row in csv.DictReader(f):
            dem, rep = row["dem_votes"], row["rep_votes"]
            if (dem and not dem.isdigit()) or (rep and not rep.isdigit()):
                continue
            year = int(row["year"])
            key = (row["state"], row["chamber"], year,
                   cycle_for(cycles, row["state"], row["chamber"], year))
            groups[key].append(row)

    header = ["state", "chamber", "year", "cycle_id", "seats", "delta_tilde", "declination",
              "delta_n", "efficiency_gap"]
    header += [f"gap_tau_{tau_label(t)}" for t in taus]
    header += ["mean_median", "seat_share_p", "vote_share_p", "n_imputed"]
    out = [",".join(header)]
    for key in sorted(groups):
        rows = groups[key]
        if any(r["multi_member"] == "true" for r in rows):
            continue
        shares, imputed, bad = [], 0, False
        for r in rows:
            if r["dem_votes"] and r["rep_votes"]:
                d, q = int(r["dem_votes"]), int(r["rep_votes"])
                if d + q == 0:
                    bad = True
                    break
                s = d / (d + q)
                if r["winner"] == "D" and s <= 0.5:
                    s = 0.505
            else:
                s = 0.65 if r["winner"] == "D" else 1 - 0.65
                imputed += 1
            shares.append(s)
        if bad:
            continue
        m = metrics(shares, taus)
        cells = [key[0], key[1], str(key[2]), key[3], str(m["n"]), fixed(m["dt"], 2),
                 fixed(m["dec"], 2), fixed(m["dn"], 1), fixed(m["eg"], 3)]
        cells += [fixed(g, 3) for g in m["gaps"]]
        cells += [fixed(m["mm"], 3), fixed(m["seat"], 3), fixed(m["vote"], 3), str(imputed)]
        out.append(",".join(cells))
    sys.stdout.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
