"""
backend/progress.py

Optional tqdm progress bars for long sweeps (Monte Carlo samples,
fit grids, pipeline instances).
"""

try:
    from tqdm import tqdm
except Exception:
    tqdm = None


def maybe_progress(it, desc=None, enable=False):
    """
    Wrap an iterator with `tqdm` only when requested and available, so
    tests and CI runs stay quiet.
    """
    if enable and tqdm:
        return tqdm(it, desc=desc, leave=False)
    return it
