"""
E(N) and mu(N) figures from a vqe results file
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import matplotlib as mpl
mpl.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from .results import sweep_rows

logger = logging.getLogger(__name__)

FIGURE_SIZE = (8.0, 3.2)


def _series(rows: List[Dict[str, Any]], key: str, err: str):
    picked = [r for r in rows if r.get(key) is not None]
    return ([r['N_occ'] for r in picked], [r[key] for r in picked], [r.get(err) or 0.0 for r in picked])


def plot_sweep(sweep: Dict[str, Any], path: str, exact: Optional[Dict[int, float]] = None,
               title: Optional[str] = None) -> Path:
    """Two panels: energy and chemical potential against occupation, with error bars"""
    rows = sweep_rows(sweep)
    fig, (ax_e, ax_mu) = plt.subplots(nrows=1, ncols=2, figsize=FIGURE_SIZE)

    n, e, e_err = _series(rows, 'E', 'stderr')
    ax_e.errorbar(n, e, yerr=e_err, fmt='o', capsize=2, label='VQE')
    if exact:
        ns = sorted(exact)
        ax_e.plot(ns, [exact[k] for k in ns], 'k--', lw=1, label='exact')
        ax_e.legend(frameon=False)
    ax_e.set_xlabel(r'$N_{\rm occ}$')
    ax_e.set_ylabel('E')

    n, mu, mu_err = _series(rows, 'mu', 'mu_stderr')
    ax_mu.errorbar(n, mu, yerr=mu_err, fmt='s', capsize=2)
    ax_mu.set_xlabel(r'$N_{\rm occ}$')
    ax_mu.set_ylabel(r'$\mu$')

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    logger.info("Figure written to %s", path)
    return path
