"""Access-frequency profile: peak communication events per Bell period.

The bias of a link is the largest number of its communication events
falling in any window strictly narrower than T_Bell; it is exactly the
number of parallel links (or ring ports, or factory ports) needed so no
event ever waits on Bell regeneration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuit import IdealTimeline
from .topology import LinkConfig


def sliding_window_peak(events: list[int], t_bell: int) -> int:
    """Max number of events in any window of width < t_bell (two-pointer).

    A single event counts 1 (a used link needs at least one channel);
    an empty list counts 0.
    """
    if not events:
        return 0
    best = 1
    lo = 0
    for hi in range(len(events)):
        while events[hi] - events[lo] >= t_bell:
            lo += 1
        if hi - lo + 1 > best:
            best = hi - lo + 1
    return best


@dataclass
class AccessProfile:
    n_alg: int
    window: int
    bias_qq: np.ndarray  # symmetric (n_alg, n_alg), zero diagonal
    bias_qf: np.ndarray  # (n_alg,)

    def to_link_config(self) -> LinkConfig:
        return LinkConfig(self.n_alg,
                          [[int(x) for x in row] for row in self.bias_qq],
                          [int(x) for x in self.bias_qf])

    def to_json(self) -> str:
        doc: dict = {"n_alg": self.n_alg, "window": self.window}
        if self.n_alg <= 64:
            doc["bias_qq"] = self.bias_qq.tolist()
        else:
            doc["bias_qq_sparse"] = [
                [int(i), int(j), int(self.bias_qq[i, j])]
                for i, j in zip(*np.nonzero(np.triu(self.bias_qq)))]
        doc["bias_qf"] = self.bias_qf.tolist()
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "AccessProfile":
        doc = json.loads(text)
        n = doc["n_alg"]
        if "bias_qq" in doc:
            qq = np.array(doc["bias_qq"], dtype=np.int64)
        else:
            qq = np.zeros((n, n), dtype=np.int64)
            for i, j, v in doc["bias_qq_sparse"]:
                qq[i, j] = qq[j, i] = v
        return AccessProfile(n, doc["window"],
                             qq, np.array(doc["bias_qf"], dtype=np.int64))


def compute_bias(timeline: IdealTimeline, t_bell: int) -> AccessProfile:
    """Per-pair and per-qubit peak event counts over the ideal timeline."""
    n = timeline.n_alg
    qq = np.zeros((n, n), dtype=np.int64)
    qf = np.zeros(n, dtype=np.int64)
    for (i, j), events in timeline.qq_events.items():
        b = sliding_window_peak(events, t_bell)
        qq[i, j] = qq[j, i] = b
    for i, events in timeline.qf_events.items():
        qf[i] = sliding_window_peak(events, t_bell)
    return AccessProfile(n, t_bell, qq, qf)


@dataclass
class ProfileStats:
    row_totals: list[int]    # per-qubit QQ bias mass
    qf_totals: list[int]
    max_bias: int
    gini: float              # concentration of per-qubit total load

    def to_json(self) -> str:
        return json.dumps({"row_totals": self.row_totals,
                           "qf_totals": self.qf_totals,
                           "max_bias": self.max_bias,
                           "gini": round(self.gini, 6)},
                          sort_keys=True, separators=(",", ":"))


def bias_summary(profile: AccessProfile) -> ProfileStats:
    rows = profile.bias_qq.sum(axis=1)
    load = rows + profile.bias_qf
    total = int(load.sum())
    if total == 0:
        gini = 0.0
    else:
        sorted_load = np.sort(load)
        n = len(sorted_load)
        cum = np.cumsum(sorted_load)
        gini = float((n + 1 - 2 * (cum.sum() / cum[-1])) / n)
    return ProfileStats([int(x) for x in rows],
                        [int(x) for x in profile.bias_qf],
                        int(max(profile.bias_qq.max(initial=0),
                                profile.bias_qf.max(initial=0))),
                        gini)
