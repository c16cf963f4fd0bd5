#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture edge lists under data/.

The public covert-network datasets are not redistributed; these fixtures are
synthetic stand-ins whose per-layer structure (active nodes, edges, component
size multiset, hence density, average degree, mean/greatest component size
and the component-size coefficient of variation) matches the published
per-layer statistics of the corresponding real multiplexes.  Deterministic:
rerunning this script reproduces the committed files byte for byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

# layer name -> (component sizes, extra non-tree edges per component, label prefix)
LONDON = {
    "underground": ([98, 19, 12, 5] + [3] * 42, [11] + [0] * 45, "u"),
    "overground": ([17, 11] + [4] * 5 + [3] * 9 + [2] * 3, [0] * 19, "o"),
    "lightrail": ([8, 8, 6, 4] + [3] * 4 + [2] * 3, [1] + [0] * 10, "l"),
}
MAFIA = {
    "meeting": ([86, 5, 4, 3, 3], [153, 3, 2, 1, 1], "p"),
    "call": ([85, 5, 4, 3, 3], [27, 1, 1, 0, 0], "q"),
}


def build_component(rng: np.random.Generator, nodes: list[str], extra: int):
    """Random recursive tree over ``nodes`` plus ``extra`` non-tree edges."""
    edges = []
    present = set()
    for k in range(1, len(nodes)):
        j = int(rng.integers(0, k))
        edges.append((nodes[j], nodes[k]))
        present.add((j, k))
    size = len(nodes)
    missing = [
        (i, j)
        for i in range(size)
        for j in range(i + 1, size)
        if (i, j) not in present
    ]
    if extra > len(missing):
        raise ValueError(f"component of size {size} cannot take {extra} extra edges")
    if extra:
        chosen = rng.choice(len(missing), size=extra, replace=False)
        for idx in sorted(int(i) for i in chosen):
            i, j = missing[idx]
            edges.append((nodes[i], nodes[j]))
    return edges


def build_multiplex(plan: dict, seed: int) -> list[str]:
    rng = np.random.default_rng(seed)
    lines = []
    for layer_name, (sizes, extras, prefix) in plan.items():
        if len(sizes) != len(extras):
            raise ValueError(f"{layer_name}: sizes/extras length mismatch")
        next_id = 1
        for size, extra in zip(sizes, extras):
            nodes = [f"{prefix}{i:03d}" for i in range(next_id, next_id + size)]
            next_id += size
            for a, b in build_component(rng, nodes, extra):
                lines.append(f"{layer_name} {a} {b}")
    return lines


def main() -> int:
    out_dir = Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)
    for name, plan, seed in (
        ("london_transport_synthetic.edges", LONDON, 20240601),
        ("sicilian_calls_synthetic.edges", MAFIA, 20240602),
    ):
        lines = build_multiplex(plan, seed)
        path = out_dir / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {path} ({len(lines)} records)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
