# Copyright 2026 The exowrist Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates reference_values.json.

Shapiro-Wilk values come from scipy.stats.shapiro (the swilk Fortran
routine); special-function values from mpmath at 50 digits. Run from this
directory: python3 generate_reference_values.py
"""

import json

import mpmath as mp
import numpy as np
from scipy import stats

mp.mp.dps = 50


def shapiro_sets():
    rng = np.random.default_rng(20240611)
    out = []
    makers = [
        ("normal", lambda n: rng.normal(0.0, 1.0, n)),
        ("uniform", lambda n: rng.uniform(-1.0, 1.0, n)),
        ("exponential", lambda n: rng.exponential(1.0, n)),
        ("student_t3", lambda n: rng.standard_t(3, n)),
        ("lognormal", lambda n: rng.lognormal(0.0, 0.6, n)),
    ]
    sizes = [3, 5, 8, 12, 20, 35, 60, 150]
    k = 0
    while len(out) < 20:
        name, make = makers[k % len(makers)]
        n = sizes[k % len(sizes)]
        x = np.round(make(n), 6)
        w, p = stats.shapiro(x)
        out.append({"name": f"{name}_{n}", "x": x.tolist(), "w": float(w), "p": float(p)})
        k += 1
    # Gate fixtures for the test selector.
    normal = np.round(np.random.default_rng(7).normal(0.5, 1.0, 12), 6)
    heavy = np.array([0.1, -0.2, 0.05, 0.15, -0.1, 0.0, 0.12, -0.05, 0.08, 9.5, -0.15, 0.02])
    gates = []
    for name, d in (("normal_like", normal), ("heavy_tailed", heavy)):
        w, p = stats.shapiro(d)
        gates.append({"name": name, "differences": d.tolist(), "w": float(w), "p": float(p)})
    return out, gates


def special_values():
    beta = []
    for a, b, x in [(0.5, 0.5, 0.3), (2.0, 3.0, 0.4), (10.0, 0.5, 0.95), (1.0, 1.0, 0.77),
                    (3.5, 12.0, 0.1), (50.0, 60.0, 0.45), (0.1, 4.0, 0.01), (7.0, 7.0, 0.5)]:
        beta.append({"a": a, "b": b, "x": x, "value": float(mp.betainc(a, b, 0, x, regularized=True))})
    gamma = []
    for a, x in [(0.5, 0.2), (1.0, 1.0), (2.5, 4.0), (10.0, 3.0), (10.0, 20.0), (0.5, 10.83 / 2),
                 (30.0, 25.0), (3.0, 0.01)]:
        gamma.append({"a": a, "x": x, "p": float(mp.gammainc(a, 0, x, regularized=True)),
                      "q": float(mp.gammainc(a, x, mp.inf, regularized=True))})
    normal = []
    for z in [-6.0, -3.2, -1.0, -0.1, 0.0, 0.5, 1.96, 4.0, 8.0]:
        cdf = mp.ncdf(z)
        normal.append({"z": z, "cdf": float(cdf), "sf": float(1 - cdf)})
    quantile = []
    for p in [1e-10, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.999999]:
        quantile.append({"p": p, "z": float(mp.sqrt(2) * mp.erfinv(2 * mp.mpf(p) - 1))})
    student = []
    for t, df in [(3.4641016151377544, 2.0), (0.5, 7.0), (2.365, 7.0), (-1.2, 15.0), (10.0, 3.0), (0.0, 5.0)]:
        t_ = mp.mpf(t)
        x = df / (df + t_ * t_)
        student.append({"t": t, "df": df, "p": float(mp.betainc(df / 2, 0.5, 0, x, regularized=True))})
    chi2 = []
    for x, df in [(21.633, 1.0), (3.841458820694124, 1.0), (0.0, 2.0), (27.71, 3.0), (5.0, 4.0), (100.0, 10.0)]:
        chi2.append({"x": x, "df": df, "sf": float(mp.gammainc(df / 2, x / 2, mp.inf, regularized=True))})
    return {"beta_inc": beta, "gamma": gamma, "normal": normal, "normal_quantile": quantile,
            "student_t_two_tailed": student, "chi_square_sf": chi2}


def main():
    sw, gates = shapiro_sets()
    doc = {"shapiro_wilk": sw, "select_gate": gates, "special": special_values()}
    with open("reference_values.json", "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
