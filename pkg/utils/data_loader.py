# utils/data_loader.py - CSV input and atomic CSV output
import os
import tempfile
import logging
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

from utils.errors import DomainError

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.15g"


def load_csv_table(data_path: str, required_columns: Optional[Iterable[str]] = None) -> pd.DataFrame:
    """
    Load a CSV file with encoding fallback. Lines starting with '#' are comments.

    Args:
        data_path: Path to the CSV file
        required_columns: Columns that must be present

    Returns:
        pd.DataFrame: The table
    """
    if not os.path.exists(data_path):
        raise FileNotFoundError(f"Data file not found: {data_path}")

    df = None
    for encoding in ['utf-8', 'utf-8-sig', 'latin-1']:
        try:
            df = pd.read_csv(data_path, encoding=encoding, comment='#')
            break
        except UnicodeDecodeError:
            continue
        except pd.errors.EmptyDataError:
            raise DomainError(f"CSV file is empty: {data_path}")
    if df is None:
        raise DomainError(f"Could not decode CSV file: {data_path}")

    df.columns = [str(c).strip() for c in df.columns]
    missing = [c for c in (required_columns or []) if c not in df.columns]
    if missing:
        raise DomainError(f"{data_path} is missing columns: {', '.join(missing)}")
    logger.debug(f"Loaded {len(df)} rows from {data_path}")
    return df


def load_decay_curve(data_path: str) -> pd.DataFrame:
    """
    Load a decay curve with columns (t_ns, counts)

    Args:
        data_path: Path to the CSV file

    Returns:
        pd.DataFrame: Curve sorted by time
    """
    df = load_csv_table(data_path, ['t_ns', 'counts'])[['t_ns', 'counts']].astype(float)
    t = df['t_ns'].to_numpy()
    if np.any(np.diff(t) <= 0):
        raise DomainError("Decay curve times must be strictly increasing")
    if (df['counts'] < 0).any():
        raise DomainError("Decay curve counts must be non-negative")
    return df


def load_tabulated_ldos(data_path: str) -> pd.DataFrame:
    """
    Load a tabulated Purcell spectrum: two columns (frequency, F_P), header required

    Args:
        data_path: Path to the CSV file

    Returns:
        pd.DataFrame: Columns renamed to ('omega', 'purcell')
    """
    df = load_csv_table(data_path)
    if df.shape[1] != 2:
        raise DomainError(f"Tabulated LDOS needs exactly two columns, found {df.shape[1]}")
    df = df.astype(float)
    df.columns = ['omega', 'purcell']
    return df


def write_csv_atomic(df: pd.DataFrame, path: str, header_comments: Optional[List[str]] = None) -> int:
    """
    Write a CSV (UTF-8, LF endings) through a temporary file and an atomic rename

    Args:
        df: Table to write
        path: Destination
        header_comments: Lines written before the header, each prefixed with '# '

    Returns:
        int: Number of data rows written
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp_', suffix='.csv')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            for line in header_comments or []:
                handle.write(f"# {line}\n")
            df.to_csv(handle, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.info(f"Wrote {len(df)} rows to {path}")
    return len(df)
