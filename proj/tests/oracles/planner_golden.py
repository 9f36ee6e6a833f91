"""Golden verdicts for the exponent planner, from the case splits by hand in Fractions.

Writes tests/data/planner_golden.csv. Run from the repository root.
"""
import csv
import itertools
from fractions import Fraction as F

THETAS = [F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4), F(1)]
PS = [F(5, 4), F(3, 2), F(2), F(3), F(4), F(4, 3), F(3, 2) + F(1, 100)]
ALPHAS = [F(1, 10), F(1, 4), F(1, 3), F(1, 2), F(3, 5), F(2, 3), F(3, 4), F(9, 10)]


def verdict(theta, p, alpha, q):
    thr = 1 - theta
    if theta == 1:
        return ("admissible" if alpha > thr else "inadmissible"), "i", "inf"
    crit = 1 / thr
    case, qreq = ("i", crit) if p < crit else ("ii", p)
    ok = alpha > thr and (q is None or q == qreq)
    return ("admissible" if ok else "inadmissible"), case, str(qreq)


def main():
    rows = []
    # full grid on the boundary-heavy values, then add explicit boundary cases
    for theta, p, alpha in itertools.product(THETAS, PS, ALPHAS):
        rows.append((theta, p, alpha, None))
    boundary = []
    for theta in THETAS[:-1]:
        crit = 1 / (1 - theta)
        boundary.append((theta, crit, 1 - theta, None))          # alpha exactly at threshold
        boundary.append((theta, crit, 1 - theta + F(1, 1000), None))
        boundary.append((theta, crit, 1 - theta + F(1, 1000), crit))
        boundary.append((theta, crit - F(1, 1000), F(99, 100), crit))
        boundary.append((theta, crit - F(1, 1000), F(99, 100), crit - F(1, 1000)))
        boundary.append((theta, crit + 1, F(99, 100), crit + 1))
    rows = boundary + rows
    rows = [r for r in rows if r[1] > 1 and 0 < r[2] < 1][:200]
    assert len(rows) == 200, len(rows)
    with open("tests/data/planner_golden.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "p", "alpha", "q", "verdict", "case", "q_required"])
        for theta, p, alpha, q in rows:
            v, c, qr = verdict(theta, p, alpha, q)
            w.writerow([str(theta), str(p), str(alpha), "" if q is None else str(q), v, c, qr])


if __name__ == "__main__":
    main()
