# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PathStreams:
    initial: np.random.Generator
    noise: np.random.Generator


def make_streams(master_seed: int, path_index: int) -> PathStreams:
    """
    Independent counter-based (Philox) generators for one path, keyed by
    (master_seed, path_index) so a path draws the same numbers whichever
    worker runs it.

      path
        ├── initial perturbation coefficients
        └── Brownian increments
    """
    root = np.random.SeedSequence([int(master_seed), int(path_index)])
    ss_initial, ss_noise = root.spawn(2)
    return PathStreams(
        initial=np.random.Generator(np.random.Philox(ss_initial)),
        noise=np.random.Generator(np.random.Philox(ss_noise)),
    )
