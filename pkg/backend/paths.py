from pathlib import Path
import os

from dotenv import load_dotenv
from platformdirs import user_data_dir

APP_NAME = "gtlab"
OUTPUT_ROOT_ENV = "GTLAB_OUTPUT_ROOT"


def ensure_dir(path):
    Path(path).mkdir(parents=True, exist_ok=True)
    return path


def output_root(cli_value=None) -> Path:
    """
    Where run directories go.

    Order: explicit value, GTLAB_OUTPUT_ROOT (environment or .env),
    then <user data dir>/gtlab/runs.
    """
    if cli_value:
        return Path(ensure_dir(Path(cli_value).expanduser()))

    load_dotenv(override=False)
    raw = os.getenv(OUTPUT_ROOT_ENV)
    if raw:
        return Path(ensure_dir(Path(raw).expanduser()))

    return Path(ensure_dir(Path(user_data_dir(APP_NAME)) / "runs"))
