"""
Results files: sorted-key JSON documents and figure-ready CSV tables
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from core.config import SCHEMA_VERSION
from core.errors import ConfigError

logger = logging.getLogger(__name__)

EXACT_COLUMNS = ['N_occ', 'E_exact', 'E_vqe', 'E_slater']
COMPARE_COLUMNS = ['optimizer', 'eta', 'seed', 'iter', 'evals', 'exact', 'predicted', 'stderr']
MITIGATE_COLUMNS = ['N_occ', 'stage', 'value', 'stderr']
SWEEP_COLUMNS = ['N_occ', 'E', 'stderr', 'mu', 'mu_stderr', 'mu_prime', 'mu_prime_stderr']


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars and arrays become Python values, non-finite floats become None"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def results_document(command: str, config: Dict[str, Any], body: Dict[str, Any]) -> Dict[str, Any]:
    """Schema-versioned document with the configuration echo"""
    document = {'schema_version': SCHEMA_VERSION, 'command': command, 'config': config}
    document.update(body)
    return document


def dumps_results(document: Dict[str, Any]) -> str:
    return json.dumps(_plain(document), indent=2, ensure_ascii=False) + "\n"


def write_results(document: Dict[str, Any], path: str) -> Path:
    """Write the document; seeded reruns produce byte-identical files"""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps_results(document))
    logger.info("Results written to %s", path)
    return path


def load_results(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read results file {path}: {str(e)}")
    if document.get('schema_version') != SCHEMA_VERSION:
        raise ConfigError(f"results file {path} has unsupported schema_version {document.get('schema_version')}")
    return document


def csv_path(results_path: str) -> Path:
    """CSV companion of a results file: same stem, .csv suffix"""
    return Path(results_path).with_suffix('.csv')


def _cell(value: Any) -> Any:
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ''
    return value


def write_csv(rows: Iterable[Dict[str, Any]], columns: Sequence[str], path: str) -> Path:
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(_plain(row.get(c))) for c in columns])
    logger.info("CSV written to %s", path)
    return path


def read_csv(path: str) -> List[Dict[str, str]]:
    with open(path, 'r', newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))


def format_table(rows: Sequence[Dict[str, Any]], columns: Sequence[str], precision: int = 6) -> str:
    """Fixed-width text table for terminal summaries"""
    def text(value: Any) -> str:
        if value is None:
            return '-'
        if isinstance(value, float):
            return f"{value:.{precision}f}"
        return str(value)

    cells = [[text(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells)
    return "\n".join(lines)


def sweep_rows(sweep: Dict[str, Any]) -> List[Dict[str, Optional[float]]]:
    """E(N), mu(N), mu'(N) rows from the 'sweep' block of a vqe results file"""
    energies = {int(n): e for n, e in sweep.get('energies', {}).items()}
    mu = {int(n): e for n, e in sweep.get('mu', {}).items()}
    mu_prime = {int(n): e for n, e in sweep.get('mu_prime', {}).items()}
    rows = []
    for n in sorted(energies):
        rows.append({
            'N_occ': n,
            'E': energies[n]['value'],
            'stderr': energies[n]['stderr'],
            'mu': mu[n]['value'] if n in mu else None,
            'mu_stderr': mu[n]['stderr'] if n in mu else None,
            'mu_prime': mu_prime[n]['value'] if n in mu_prime else None,
            'mu_prime_stderr': mu_prime[n]['stderr'] if n in mu_prime else None,
        })
    return rows
