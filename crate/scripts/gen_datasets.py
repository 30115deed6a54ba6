#!/usr/bin/env python3
"""Generate the bundled benchmark datasets under data/.

iris.csv is the classic Fisher iris data (via scikit-learn). The other five
files are deterministic synthetic benchmark sets shaped like well-known small
UCI datasets (same sample counts, dimensionalities, and class proportions),
with class geometry chosen to pose the same kind of one-class difficulty:
compact vs. dispersed classes, rule-like separable classes, and weak-signal
survey data. Rerunning this script reproduces the files byte-for-byte.
"""

import os

import numpy as np
from sklearn.datasets import load_iris

OUT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def write_csv(name, rows):
    path = os.path.join(OUT, name)
    with open(path, "w") as f:
        for row in rows:
            f.write(",".join(row) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")


def gen_iris():
    data = load_iris()
    names = {0: "Setosa", 1: "Versicolor", 2: "Virginica"}
    rows = []
    for klass in (0, 1, 2):
        for x, y in zip(data.data, data.target):
            if y == klass:
                rows.append([f"{v:.1f}" for v in x] + [names[y]])
    write_csv("iris.csv", rows)


def gen_seeds():
    # Three wheat-like varieties, 7 correlated geometric measurements.
    # Kama sits between Rosa (large) and Canadian (small), so neighbouring
    # varieties overlap moderately.
    rng = np.random.default_rng(731)
    params = {
        # area, perimeter, compactness, length, width, asymmetry, groove
        "Kama": ([14.35, 14.29, 0.880, 5.51, 3.24, 2.7, 5.09], [1.15, 0.57, 0.015, 0.23, 0.18, 1.2, 0.26]),
        "Rosa": ([18.33, 16.14, 0.884, 6.15, 3.68, 3.6, 6.02], [1.40, 0.62, 0.015, 0.27, 0.19, 1.2, 0.25]),
        "Canadian": ([11.87, 13.25, 0.849, 5.23, 2.85, 4.8, 5.12], [0.72, 0.34, 0.021, 0.14, 0.15, 1.3, 0.16]),
    }
    rows = []
    for name, (mu, sd) in params.items():
        for _ in range(70):
            size = rng.normal()  # shared latent size factor
            x = np.empty(7)
            weights = [0.85, 0.85, 0.1, 0.8, 0.75, -0.2, 0.7]  # correlation with size
            for d in range(7):
                noise = rng.normal() * np.sqrt(max(1.0 - weights[d] ** 2, 0.05))
                x[d] = mu[d] + sd[d] * (weights[d] * size + noise)
            x[2] = min(max(x[2], 0.80), 0.92)
            x[5] = max(x[5], 0.2)
            rows.append([f"{v:.4f}" for v in x] + [name])
    write_csv("seeds.csv", rows)


def gen_ionosphere():
    # 16 complex radar pulse returns (32 reals in [-1, 1]). "Good" returns are
    # damped oscillations on a low-dimensional manifold; "Bad" returns are a
    # dispersed mixture of noise, sparse spikes, and over-damped remnants,
    # which makes the Bad class a poor one-class target.
    rng = np.random.default_rng(947)
    rows = []

    def good_row():
        t = np.arange(16)
        amp = rng.uniform(0.75, 1.0)
        decay = rng.uniform(0.02, 0.12)
        w = rng.uniform(0.25, 0.85)
        phi = rng.normal(0, 0.3)
        env = amp * np.exp(-decay * t)
        re = env * np.cos(w * t + phi) + rng.normal(0, 0.08, 16)
        im = env * np.sin(w * t + phi) + rng.normal(0, 0.08, 16)
        x = np.empty(32)
        x[0::2] = re
        x[1::2] = im
        return np.clip(x, -1, 1)

    def bad_row():
        mode = rng.uniform()
        if mode < 0.5:
            x = rng.uniform(-1, 1, 32)
        elif mode < 0.75:
            x = np.where(rng.uniform(size=32) < 0.6, 0.0, rng.choice([-1, 1], 32) * rng.uniform(0.3, 1.0, 32))
        else:
            t = np.arange(16)
            env = rng.uniform(0.4, 1.0) * np.exp(-rng.uniform(0.3, 0.9) * t)
            w = rng.uniform(0.1, 2.5)
            x = np.empty(32)
            x[0::2] = env * np.cos(w * t) + rng.normal(0, 0.3, 16)
            x[1::2] = env * np.sin(w * t) + rng.normal(0, 0.3, 16)
        return np.clip(x, -1, 1)

    for _ in range(225):
        rows.append([f"{v:.5f}" for v in good_row()] + ["Good"])
    for _ in range(126):
        rows.append([f"{v:.5f}" for v in bad_row()] + ["Bad"])
    write_csv("ionosphere.csv", rows)


def gen_sonar():
    # 60-band energy spectra in [0, 1]. Mines concentrate energy in narrower
    # mid-band humps; rocks spread energy over broader, more irregular bumps.
    # Within-class variability stays high, so the classes overlap heavily.
    rng = np.random.default_rng(389)
    bands = np.arange(60)
    rows = []

    def spectrum(centers, widths, amps):
        s = np.zeros(60)
        for c, w, a in zip(centers, widths, amps):
            s += a * np.exp(-0.5 * ((bands - c) / w) ** 2)
        s *= 1.0 + rng.normal(0, 0.18, 60)
        s += rng.uniform(0.005, 0.05)
        return np.clip(s, 0.0, 1.0)

    def rock_row():
        k = rng.integers(2, 5)
        centers = rng.uniform(4, 56, k)
        widths = rng.uniform(6, 15, k)
        amps = rng.uniform(0.25, 0.65, k)
        return spectrum(centers, widths, amps)

    def mine_row():
        k = rng.integers(1, 4)
        centers = np.clip(rng.normal(34, 7, k), 8, 55)
        widths = rng.uniform(3, 8, k)
        amps = rng.uniform(0.45, 0.95, k)
        return spectrum(centers, widths, amps)

    for _ in range(97):
        rows.append([f"{v:.4f}" for v in rock_row()] + ["Rock"])
    for _ in range(111):
        rows.append([f"{v:.4f}" for v in mine_row()] + ["Mines"])
    write_csv("sonar.csv", rows)


def gen_bankruptcy():
    # Six qualitative risk ratings encoded 1 (negative), 2 (average),
    # 3 (positive). Three attributes carry most of the signal, mimicking a
    # rule-generated assessment dataset; classes are nearly separable.
    rng = np.random.default_rng(577)
    rows = []
    strong_no, weak_no = [0.06, 0.24, 0.70], [0.22, 0.38, 0.40]
    strong_b, weak_b = [0.62, 0.30, 0.08], [0.40, 0.35, 0.25]

    def row(strong, weak):
        vals = []
        for d in range(6):
            p = strong if d < 3 else weak
            vals.append(str(rng.choice([1, 2, 3], p=p)))
        return vals

    for _ in range(143):
        rows.append(row(strong_no, weak_no) + ["NoBankruptcy"])
    for _ in range(107):
        rows.append(row(strong_b, weak_b) + ["Bankruptcy"])
    write_csv("bankruptcy.csv", rows)


def gen_happiness():
    # Survey ratings 1..5 with a weak class signal (label in the FIRST
    # column). Deliberately noisy: resident happiness correlates only mildly
    # with the service ratings.
    rng = np.random.default_rng(263)
    rows = []
    signal = np.array([1.0, 0.1, 0.0, 0.3, 0.7, 0.9])

    def row(direction):
        base = 3.05 + 0.42 * direction * signal
        vals = np.clip(np.rint(base + rng.normal(0, 1.15, 6)), 1, 5).astype(int)
        return [str(v) for v in vals]

    for _ in range(66):
        rows.append(["Unhappy"] + row(-1.0))
    for _ in range(77):
        rows.append(["Happy"] + row(+1.0))
    write_csv("happiness.csv", rows)


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    gen_iris()
    gen_seeds()
    gen_ionosphere()
    gen_sonar()
    gen_bankruptcy()
    gen_happiness()
