"""Seeded sampling of the quantifier domain t >= s >= t0 >= 0 and of probe vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal_space import Signal, translate

DEFAULT_SEED = 12345


@dataclass(frozen=True)
class Grid:
    """Random triples t0 ~ U[0,T], s = t0 + U[0,T-t0], t = s + U[0,T-s].

    ``explicit`` replaces the random triples by a fixed list of (t, s, t0).
    ``translates`` selects the sampled points x_c of X as translates of the
    system's base signal.
    """

    horizon: float = 20.0
    triple_count: int = 200
    seed: int = DEFAULT_SEED
    random_probes: int = 8
    translates: tuple[float, ...] = (0.0,)
    explicit: tuple[tuple[float, float, float], ...] | None = None

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.triple_count < 1:
            raise ValueError("triple_count must be >= 1")
        if self.explicit is not None:
            for t, s, t0 in self.explicit:
                if not t >= s >= t0 >= 0:
                    raise ValueError(f"explicit triple {(t, s, t0)} is not ordered t >= s >= t0 >= 0")

    def _streams(self):
        return [np.random.default_rng(ss) for ss in np.random.SeedSequence(self.seed).spawn(3)]

    def triples(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.explicit is not None:
            arr = np.asarray(self.explicit, dtype=float).reshape(-1, 3)
            return arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy()
        rng = self._streams()[0]
        T, m = float(self.horizon), self.triple_count
        u = rng.uniform(0.0, 1.0, size=(3, m))
        t0 = u[0] * T
        s = t0 + u[1] * (T - t0)
        t = s + u[2] * (T - s)
        return t, s, t0

    def probes(self, dim: int) -> np.ndarray:
        """Columns: all signed basis vectors, then l1-normalised random vectors."""
        rng = self._streams()[1]
        basis = np.hstack([np.eye(dim), -np.eye(dim)])
        rand = rng.standard_normal((dim, self.random_probes))
        rand /= np.abs(rand).sum(axis=0, keepdims=True)
        return np.hstack([basis, rand])

    def dual_probes(self, dim: int) -> np.ndarray:
        """Columns with sup-norm exactly 1 (the dual unit sphere of l1)."""
        rng = self._streams()[2]
        basis = np.hstack([np.eye(dim), -np.eye(dim)])
        rand = rng.uniform(-1.0, 1.0, size=(dim, self.random_probes))
        rand /= np.abs(rand).max(axis=0, keepdims=True)
        return np.hstack([basis, rand])

    def points(self, base: Signal) -> list[Signal]:
        return [translate(base, c) for c in self.translates]

    def describe(self) -> dict:
        out = {
            "seed": self.seed,
            "horizon": self.horizon,
            "triple_count": self.triple_count if self.explicit is None else len(self.explicit),
            "random_probes": self.random_probes,
            "translates": list(self.translates),
        }
        if self.explicit is not None:
            out["explicit"] = [list(p) for p in self.explicit]
        return out
