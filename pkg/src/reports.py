"""
Tabular reports over behaviours: outputs per word, language growth per
length, subtree census per depth, and the acceptance-check summary.
"""
import logging
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, TypedDict

import pandas as pd

from src.kernel import DeterminizedSystem, behaviours_up_to
from src.rps import Scheme, Tree, format_tree, subtree_census, tree_height, unfold
from src.utils import format_input_word

logger = logging.getLogger(__name__)


class CheckResult(TypedDict):
    """One row of the acceptance summary."""
    Check: str
    Cases: int
    Mismatches: int
    Passed: bool
    Seconds: float


def behaviour_table(system: DeterminizedSystem, starts: Mapping[str, Any], max_len: int,
                    format_value: Callable[[Any], Any] = lambda v: v) -> pd.DataFrame:
    """
    One row per word of length <= max_len (length-lex), one column per
    start value.
    """
    columns: Dict[str, Dict] = {label: behaviours_up_to(system, start, max_len) for label, start in starts.items()}
    words = list(next(iter(columns.values()))) if columns else []
    df = pd.DataFrame({
        'word': [format_input_word(w) for w in words],
        'length': [len(w) for w in words],
        **{label: [format_value(table[w]) for w in words] for label, table in columns.items()},
    })
    logger.info(f"Behaviour table: {len(df)} words x {len(columns)} starts")
    return df


def series_table(series: Mapping[tuple, Any]) -> pd.DataFrame:
    """Nonzero coefficients as rows (word, length, coefficient)."""
    return pd.DataFrame({
        'word': [format_input_word(w) for w in series],
        'length': [len(w) for w in series],
        'coefficient': list(series.values()),
    })


def language_growth(words: Iterable[Sequence[str]], max_len: int) -> pd.DataFrame:
    """Number of words per length 0..max_len (zeros included)."""
    counts = pd.Series([len(w) for w in words], dtype='int64').value_counts()
    counts = counts.reindex(range(max_len + 1), fill_value=0)
    return pd.DataFrame({'length': list(range(max_len + 1)), 'words': counts.values.astype(int)})


def census_table(scheme: Scheme, root: Tree, depths: Iterable[int]) -> pd.DataFrame:
    rows = []
    for d in depths:
        prefix = unfold(scheme, root, d)
        rows.append({
            'depth': d,
            'census': subtree_census(prefix),
            'height': tree_height(prefix),
            'prefix': format_tree(prefix),
        })
    return pd.DataFrame(rows, columns=['depth', 'census', 'height', 'prefix'])


def summarize_checks(results: List[CheckResult], verbose: bool = True) -> pd.DataFrame:
    """
    Collect acceptance checks into a DataFrame, failures first.

    Args:
        results: list of CheckResult dictionaries
        verbose: print the summary table

    Returns:
        DataFrame sorted by Passed, then Check
    """
    if not results:
        logger.warning("No check results provided")
        return pd.DataFrame(columns=list(CheckResult.__annotations__))

    df = pd.DataFrame(results)
    df['Seconds'] = df['Seconds'].round(3)
    df = df.sort_values(['Passed', 'Check'], kind='stable').reset_index(drop=True)

    if verbose:
        print("\n" + "=" * 70)
        print("ACCEPTANCE SUMMARY")
        print("=" * 70)
        print(f"\n{df.to_string(index=False)}")
        failed = int((~df['Passed']).sum())
        print(f"\n{len(df) - failed}/{len(df)} checks passed")

    return df
