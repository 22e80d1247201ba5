"""Named experiments, their default configs and acceptance tolerances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import experiments as E


@dataclass(frozen=True)
class Entry:
    name: str
    run: Callable
    citation: str
    summary: str
    defaults: dict
    criteria: tuple[int, ...] = ()

    def catalog(self) -> dict:
        return {"name": self.name, "citation": self.citation, "summary": self.summary,
                "criteria": list(self.criteria), "defaults": dict(self.defaults)}


COMMON = {"n_max": 10**7, "ratio": 1.2, "ensemble": 100, "seed": 20240611}

_ENTRIES = [
    Entry("spdc-sums", E.spdc_sums,
          'Thm 2.2, "satisfying condition (SPDC)"',
          "Doubling and tent maps, phi = d^-2 at 0.3: log S_n and log M_n grow with slope 1/alpha_phi = 2.",
          {"k": 2.0, "xtilde": 0.3, "slope_tol": 0.25}),
    Entry("gm-maxima", E.gm_maxima,
          'Prop 2.3, "there is an n_0 such that"; Prop 2.4, "the induced system over a domain"',
          "Induced LSV alpha=2: |Y_n| tail, x_n asymptotics and return-time maxima M_k ~ k^(1/beta).",
          {"alpha": 2.0, "n_max": 10**6, "k_lo": 1e4, "k_hi": 1e6, "slope_tol": 0.25,
           "fast_forward": True, "tail_n_lo": 100, "tail_n_hi": 100000, "tail_slope_tol": 0.05,
           "x_check_n": 10**6, "x_check_range": [0.9, 1.1]},
          (2, 3)),
    Entry("loglaw", E.loglaw,
          'Cor 2.14, "max(1,alpha)"',
          "LSV hitting times of balls around 0.8 scale like r^-max(1, alpha).",
          {"alphas": [1.0, 2.0], "xtilde": 0.8, "n_max": 10**8, "radius_exp_lo": 5,
           "radius_exp_hi": 18, "tol": 0.2},
          (4,)),
    Entry("tent-hit", E.tent_hit,
          'Lemma 2.6, "Consider the tent map"',
          "Tent map, phi = -log d at random targets: log tau_u = u + O(log u).",
          {"n_max": 10**8, "ensemble": 50, "u_lo": 5, "u_hi": 18, "log_const": 10.0,
           "min_fraction": 0.9},
          (8,)),
    Entry("max-hit-duality", E.max_hit_duality,
          'Thm 2.13, "If x~=0, then" (maxima read through hitting times)',
          "Exact event identity {M_n <= u} = {tau_u >= n} and trace monotonicity on every orbit.",
          {"alpha": 2.0, "xtilde": 0.8, "n_max": 10**6, "ensemble": 20, "u_lo": 2.0,
           "u_hi": 1e6, "n_levels": 40},
          (1,)),
    Entry("bc-infinite", E.bc_infinite,
          'Thm 2.9, "strong Borel--Cantelli sequence"',
          "LSV alpha=2, mu(B_k) = k^-0.3 at 0.8: hit counts sit between the two sandwich series.",
          {"alpha": 2.0, "center": 0.8, "zeta": 0.3, "eps": 0.25, "ensemble": 200,
           "min_fraction": 0.9},
          (7,)),
    Entry("maxima-int", E.maxima_int,
          'Thm 2.13, "If x~=0, then"',
          "LSV alpha=2, phi = d^-1 at 0 and 0.8: log M_n grows with slope 1/2.",
          {"alpha": 2.0, "xtildes": [0.0, 0.8], "k": 1.0, "slope_center": 0.5, "slope_tol": 0.12,
           "window": 0.5},
          (5,)),
    Entry("runlength", E.runlength,
          'Thm 2.16, "xi^(1)_n(x)/log_2 n"',
          "LSV alpha=2: longest run of ones ~ log2 n / alpha, longest run of zeros ~ n^(1 - o(1)).",
          {"alpha": 2.0, "ratio1_range": [0.35, 0.65], "ratio0_range": [0.9, 1.05]},
          (6,)),
    Entry("erdos-renyi", E.erdos_renyi_exp,
          'Thm 2.16, "xi^(1)_n(x)/log_2 n" (Erdos-Renyi form)',
          "LSV alpha=2, windows K(n) = 0.8 log2 n / alpha are eventually all ones.",
          {"alpha": 2.0, "c": 0.8, "ratio_range": [0.95, 1.0]},
          (6,)),
    Entry("rotation-oscillation", E.rotation_oscillation,
          'Prop 7.1, "rotation of the circle"',
          "Rotation by a type-4 angle, phi = d^-2: log S_n / log n oscillates between 1 + beta/gamma and beta.",
          {"gamma": 4.0, "beta": 2.0, "cf_depth": 6, "n_max": 10**8, "ensemble": 50,
           "slack": 0.2, "gap_min": 0.3, "min_fraction": 0.8},
          (9,)),
    Entry("skew-oscillation", E.skew_oscillation,
          'Prop 7.4 (oscillating), skew product over the doubling map',
          "Doubling skew rotation by a type-4 angle: oscillation between 2 + beta/gamma and beta.",
          {"gamma": 4.0, "beta": 2.0, "cf_depth": 6, "n_max": 10**8, "ensemble": 50,
           "slack": 0.2, "gap_min": 0.3, "min_fraction": 0.8},
          (9,)),
    Entry("yxi-slow", E.yxi_slow,
          'Prop 7.4, skew product with a Y_xi pair of angles',
          "Two-angle skew product on T^3: limsup log S_n / log n stays below k / max(3, xi) + 1.",
          {"xi": 4.0, "k": 13.0, "xtilde": 0.3, "cf_depth": 4, "ensemble": 20,
           "slack": 0.25, "min_fraction": 0.8}),
    Entry("gamma-bound", E.gamma_bound,
          'Appendix Lemma, "P_n <= D_1(1 - D_0 gamma^-beta_n)^n"',
          "Induced LSV alpha=2: probability that n returns all stay below gamma_n is summable.",
          {"alpha": 2.0, "check_n": [1000, 10000], "eps": 0.2, "ensemble": 10**4,
           "bound_const": 10.0, "fast_forward": True},
          (10,)),
    Entry("tower-bc", E.tower_bc,
          'Thm 8.1, "modelled by a (one-dimensional) Young tower"',
          "Synthetic Young tower, beta=0.5: level-0 hits of k^-0.3 targets obey the lower sandwich bound.",
          {"beta": 0.5, "i_max": 10**7, "center": 0.8, "zeta": 0.3, "eps": 0.25, "ensemble": 200,
           "liminf_min": 0.9, "min_fraction": 0.9},
          (7,)),
    Entry("aaronson-diagnostic", E.aaronson,
          'Prop 1.1 (no a(S_n)/n normalisation converges)',
          "LSV alpha=2, phi = d^-1 at 0.8: a(S_n)/n with a(x) = x^(alpha_phi - 0.1) drops tenfold.",
          {"alpha": 2.0, "xtilde": 0.8, "k": 1.0, "eps": 0.1, "n_from": 10**4, "n_to": 10**7,
           "min_drop": 10.0, "min_fraction": 0.9},
          (11,)),
]

REGISTRY: dict[str, Entry] = {e.name: e for e in _ENTRIES}


class UnknownExperiment(KeyError):
    def __str__(self):
        return f"unknown experiment {self.args[0]!r}; known: {', '.join(REGISTRY)}"


def get(name: str) -> Entry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownExperiment(name) from None


def default_config(name: str) -> dict:
    cfg = {"experiment": name, **COMMON, **get(name).defaults}
    return cfg


def list_experiments() -> list[dict]:
    return [e.catalog() for e in _ENTRIES]
